#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace belgrad {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Output is a pure function of (counter, key), so any path's stream can be
// regenerated independently of the order paths are scheduled in.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeylA;
        key[1] += kWeylB;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMulA = 0xD2511F53u;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Keys separate independent uses of one master seed (outer paths, inner
/// nested paths, test-direction sampling, ...).
enum class StreamTag : std::uint64_t {
  kPaths = 0,
  kInnerPaths = 1,
  kDirections = 2,
  kAuditPoints = 3,
};

constexpr Philox4x32::Key derive_key(std::uint64_t master_seed, StreamTag tag) {
  const std::uint64_t mixed = splitmix64(master_seed ^ splitmix64(static_cast<std::uint64_t>(tag) + 1));
  return {static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
}

/// Standard normal variates for one stream (one Monte Carlo path).
/// Box-Muller on 53-bit uniforms; explicit so results are identical across
/// standard library implementations.
class NormalStream {
 public:
  NormalStream(Philox4x32::Key key, std::uint64_t stream) : key_(key), stream_(stream) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto block = Philox4x32::generate(
        {static_cast<std::uint32_t>(draw_), static_cast<std::uint32_t>(draw_ >> 32),
         static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
        key_);
    ++draw_;
    const std::uint64_t w0 = (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
    const std::uint64_t w1 = (static_cast<std::uint64_t>(block[2]) << 32) | block[3];
    const double u0 = to_open_unit(w0);
    const double u1 = to_open_unit(w1);
    const double radius = std::sqrt(-2.0 * std::log(u0));
    const double angle = 2.0 * std::numbers::pi * u1;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform on (0, 1); consumes a whole Philox block.
  double uniform() {
    const auto block = Philox4x32::generate(
        {static_cast<std::uint32_t>(draw_), static_cast<std::uint32_t>(draw_ >> 32),
         static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
        key_);
    ++draw_;
    return to_open_unit((static_cast<std::uint64_t>(block[0]) << 32) | block[1]);
  }

 private:
  static double to_open_unit(std::uint64_t w) {
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t draw_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace belgrad

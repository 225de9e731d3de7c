#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "belgrad/regularization.hpp"
#include "belgrad/rng.hpp"

namespace belgrad {

struct SimConfig {
  double t_final = 1.0;
  double dt = 1e-3;
  std::size_t n_paths = 1000;
  std::uint64_t master_seed = 20240611;
  int workers = 0;  // 0: OpenMP default
  bool track_tangent = true;  // false: only X and the Feynman-Kac integral
  // Extra times at which every path's state is recorded. Added to the grid.
  std::vector<double> snapshot_times;
};

/// Throws std::invalid_argument unless 0 < dt <= t_final, n_paths > 0 and
/// every snapshot time lies in (0, t_final].
void validate(const SimConfig& cfg);

/// Uniform steps of dt from 0, a final partial step to t_final, with the
/// extra times merged in. Points closer than 1e-9 dt to an extra time are
/// replaced by it.
std::vector<double> time_grid(double t_final, double dt, const std::vector<double>& extra = {});

/// The augmented state of one path at one time r.
struct AugmentedPath {
  Vec x;                     // X(r)
  Vec eta;                   // tangent process in direction h
  double beta = 0.0;         // int_0^r V_n(X(s)) ds
  double bel = 0.0;          // int_0^r <sigma_n(X)^-1 eta, dW>
  double grad_v_eta = 0.0;   // int_0^r <grad V_n(X(s)), eta(s)> ds
  double s_grad_v_eta = 0.0; // int_0^r s <grad V_n(X(s)), eta(s)> ds
  double v_running_max = 0.0;
  double x_running_max = 0.0;  // max_s |X(s)|
  double time = 0.0;
  bool exploded = false;

  /// int_0^r (1 - s/r) <grad V_n(X(s)), eta(s)> ds
  double i2() const { return time > 0.0 ? grad_v_eta - s_grad_v_eta / time : 0.0; }
};

class ExplosionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularDiffusionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Euler-Maruyama for X together with the tangent process, the Feynman-Kac
/// integral and the BEL stochastic integral, all driven by one increment.
class PathIntegrator {
 public:
  static constexpr double kExplosionRadius = 1e8;

  explicit PathIntegrator(const RegularizedModel& model, bool track_tangent = true);

  AugmentedPath start(const Vec& x0, const Vec& h) const;

  /// One step of size dt using dim normals from the stream. Exploded paths
  /// are left untouched.
  void step(AugmentedPath& state, double dt, NormalStream& normals) const;

  int dim() const { return dim_; }
  /// state with v_running_max updated by V_n at the current point.
  AugmentedPath with_current_potential(AugmentedPath state) const;

 private:
  Vec solve_sigma(const Mat& sigma, const Vec& rhs) const;

  const RegularizedModel* model_;
  int dim_;
  bool track_tangent_;
  bool constant_sigma_;
  Mat sigma_const_;
  Mat sigma_inv_const_;
};

struct PathEnsemble {
  int dim = 1;
  std::uint64_t master_seed = 0;
  std::size_t n_steps = 0;
  double t_final = 0.0;
  double dt = 0.0;
  Vec x0;
  Vec h;
  std::vector<AugmentedPath> paths;
  std::vector<double> snapshot_times;
  // snapshots[k * snapshot_times.size() + j]: path k at snapshot_times[j]
  std::vector<AugmentedPath> snapshots;

  std::size_t n_paths() const { return paths.size(); }
  std::size_t n_exploded() const;
  /// Throws ExplosionError if any path was flagged.
  void require_no_explosions() const;
  const AugmentedPath& snapshot(std::size_t path, std::size_t j) const {
    return snapshots[path * snapshot_times.size() + j];
  }
};

/// Runs one path through the grid, filling snapshot states if requested.
AugmentedPath simulate_path(const PathIntegrator& integrator, const Vec& x0, const Vec& h,
                            const std::vector<double>& grid, const std::vector<std::size_t>& snapshot_index,
                            NormalStream normals, AugmentedPath* snapshots_out);

/// Path-parallel (OpenMP). Path k draws only from stream k of the key derived
/// from the master seed, so the result does not depend on the worker count.
PathEnsemble simulate_ensemble(const RegularizedModel& model, const Vec& x0, const Vec& h, const SimConfig& cfg);

/// Single-threaded reference; bit-identical to simulate_ensemble.
PathEnsemble simulate_ensemble_serial(const RegularizedModel& model, const Vec& x0, const Vec& h,
                                      const SimConfig& cfg);

struct LocalizationResult {
  double max_difference = 0.0;  // max |X - X_n| at t_final over paths that stayed in |x| < n
  double exited_fraction = 0.0;
  std::size_t n_surviving = 0;
};

/// Simulates the model and its n-th regularization with identical seeds.
LocalizationResult localization_agreement(const SdeModel& model, int n, const Vec& x0, const SimConfig& cfg);

/// Versioned little-endian binary dump of the final states.
void write_ensemble(const std::filesystem::path& file, const PathEnsemble& ensemble);
PathEnsemble read_ensemble(const std::filesystem::path& file);

}  // namespace belgrad

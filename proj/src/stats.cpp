#include "belgrad/stats.hpp"

#include <stdexcept>

namespace belgrad {

Estimate estimate_from_samples(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("estimate_from_samples: no samples");
  const auto n = samples.size();
  CompensatedSum sum;
  for (double s : samples) sum.add(s);
  const double mean = sum.value() / static_cast<double>(n);

  double stderr_value = 0.0;
  if (n > 1) {
    CompensatedSum squares;
    for (double s : samples) {
      const double d = s - mean;
      squares.add(d * d);
    }
    const double variance = squares.value() / static_cast<double>(n - 1);
    stderr_value = std::sqrt(variance / static_cast<double>(n));
  }
  return Estimate{mean, stderr_value, n};
}

}  // namespace belgrad

#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace belgrad {

/// Largest state dimension supported. Vectors and matrices live on the stack
/// (Eigen fixed-capacity storage) so the per-step kernels never allocate.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// The d Jacobians D(sigma_i), one per column sigma_i of the diffusion matrix.
/// Entry (j, k) of matrix i is d sigma_{j i} / d x_k.
struct DiffusionJacobians {
  int count = 0;
  std::array<Mat, kMaxDim> columns;

  DiffusionJacobians() = default;
  explicit DiffusionJacobians(int dim) : count(dim) {
    for (int i = 0; i < dim; ++i) columns[i] = Mat::Zero(dim, dim);
  }

  Mat& operator[](int i) { return columns[static_cast<std::size_t>(i)]; }
  const Mat& operator[](int i) const { return columns[static_cast<std::size_t>(i)]; }
};

inline Vec zero_vec(int dim) { return Vec::Zero(dim); }

inline Vec unit_vec(int dim, int axis) {
  Vec v = Vec::Zero(dim);
  v(axis) = 1.0;
  return v;
}

inline Vec make_vec(std::initializer_list<double> values) {
  if (values.size() == 0 || values.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("vector dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace belgrad

#pragma once

#include <cmath>

#include "belgrad/model.hpp"

namespace belgrad::testing {

// 1-d model dX = b(X) dt + s dW with analytic Jacobians supplied by the caller.
inline SdeModel scalar_model(std::function<double(double)> b, std::function<double(double)> db, double s,
                             WeightSpec weight, double L) {
  SdeModel m;
  m.name = "scalar";
  m.dim = 1;
  m.nu = s * s;
  m.drift = [b](const Vec& x) { return make_vec({b(x[0])}); };
  m.drift_jacobian = [db](const Vec& x) {
    Mat j(1, 1);
    j(0, 0) = db(x[0]);
    return j;
  };
  m.diffusion = [s](const Vec&) {
    Mat m1(1, 1);
    m1(0, 0) = s;
    return m1;
  };
  m.diffusion_jacobians = [](const Vec&) { return DiffusionJacobians(1); };
  m.weight = weight;
  m.lyapunov_L = L;
  m.constant_diffusion = true;
  return m;
}

inline std::vector<Vec> line_grid(double lo, double hi, int n) {
  std::vector<Vec> out;
  for (int i = 0; i <= n; ++i) out.push_back(make_vec({lo + (hi - lo) * i / n}));
  return out;
}

}  // namespace belgrad::testing

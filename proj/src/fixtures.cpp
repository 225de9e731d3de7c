#include "belgrad/fixtures.hpp"

#include <cmath>
#include <stdexcept>

#include "belgrad/counterexample.hpp"

namespace belgrad {

namespace {

DiffusionJacobians zero_jacobians(int dim) {
  DiffusionJacobians out;
  out.count = dim;
  for (int i = 0; i < dim; ++i) out.columns[i] = Mat::Zero(dim, dim);
  return out;
}

Mat scaled_identity(int dim, double s) { return s * Mat::Identity(dim, dim); }

}  // namespace

Fixture brownian_fixture() {
  Fixture fx;
  fx.name = "bm";
  SdeModel& m = fx.model;
  m.name = "bm";
  m.dim = 2;
  m.nu = 1.0;
  m.drift = [](const Vec& x) { return zero_vec(x.size()); };
  m.drift_jacobian = [](const Vec& x) { return Mat::Zero(x.size(), x.size()); };
  m.diffusion = [](const Vec& x) { return scaled_identity(x.size(), 1.0); };
  m.diffusion_jacobians = [](const Vec& x) { return zero_jacobians(x.size()); };
  m.weight = WeightSpec(1.0, 1.0, 1.0);
  // 2 <b,x> + Tr a + 8 |x|^2 / (1 + |x|^2) <= 10 <= 10 (1 + |x|^2)
  m.lyapunov_L = 10.0;
  m.constant_diffusion = true;
  fx.regularization_level = 8;
  fx.default_x = make_vec({0.5, -0.25});
  return fx;
}

Fixture ou_fixture() {
  Fixture fx;
  fx.name = "ou";
  SdeModel& m = fx.model;
  m.name = "ou";
  m.dim = 1;
  m.nu = 1.0;
  m.drift = [](const Vec& x) { return Vec(-x); };
  m.drift_jacobian = [](const Vec& x) { return scaled_identity(x.size(), -1.0); };
  m.diffusion = [](const Vec& x) { return scaled_identity(x.size(), 1.0); };
  m.diffusion_jacobians = [](const Vec& x) { return zero_jacobians(x.size()); };
  // H2 needs 2 |Db h| = 2 <= f(1 + x^2)
  m.weight = WeightSpec(1.0, 2.0, 1.0);
  m.lyapunov_L = 9.0;
  m.constant_diffusion = true;
  fx.regularization_level = 8;
  fx.default_x = make_vec({1.0});
  return fx;
}

Fixture sinsq_fixture() {
  Fixture fx;
  fx.name = "sinsq";
  SdeModel& m = fx.model;
  m.name = "sinsq";
  m.dim = 1;
  m.nu = 2.0;
  m.drift = [](const Vec& x) { return make_vec({x[0] * std::sin(x[0] * x[0])}); };
  m.drift_jacobian = [](const Vec& x) {
    const double s = x[0] * x[0];
    Mat j(1, 1);
    j(0, 0) = std::sin(s) + 2.0 * s * std::cos(s);
    return j;
  };
  m.diffusion = [](const Vec& x) { return scaled_identity(x.size(), std::sqrt(2.0)); };
  m.diffusion_jacobians = [](const Vec& x) { return zero_jacobians(x.size()); };
  // 2 |b'| reaches 2 + 4 x^2, so f(t) = 2t is too small near x = 1; 4t covers it.
  m.weight = WeightSpec(1.0, 4.0, 1.0);
  m.lyapunov_L = 18.0;
  m.constant_diffusion = true;
  fx.regularization_level = 4;
  fx.default_x = make_vec({0.5});
  return fx;
}

Fixture counterexample_fixture(double theta) {
  Counterexample cx(theta);
  Fixture fx;
  fx.name = "counterexample";
  fx.model = export_as_sde_model(cx);
  fx.regularization_level = 2 * cx.n0();
  fx.default_x = make_vec({0.0});
  for (double x : counterexample_sample_points(cx, 60, 8)) fx.extra_audit_points.push_back(make_vec({x}));
  return fx;
}

Fixture fixture_by_name(const std::string& name, double theta) {
  if (name == "bm") return brownian_fixture();
  if (name == "ou") return ou_fixture();
  if (name == "sinsq") return sinsq_fixture();
  if (name == "counterexample") return counterexample_fixture(theta);
  throw std::invalid_argument("unknown fixture '" + name + "' (bm, ou, sinsq, counterexample)");
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"bm", "ou", "sinsq", "counterexample"};
  return names;
}

double ou_cos_mean(double lambda, double t, double x) {
  const double mean = x * std::exp(-t);
  const double var = 0.5 * (1.0 - std::exp(-2.0 * t));
  return std::cos(lambda * mean) * std::exp(-0.5 * lambda * lambda * var);
}

double ou_cos_gradient(double lambda, double t, double x) {
  const double mean = x * std::exp(-t);
  const double var = 0.5 * (1.0 - std::exp(-2.0 * t));
  return -lambda * std::exp(-t) * std::sin(lambda * mean) * std::exp(-0.5 * lambda * lambda * var);
}

}  // namespace belgrad

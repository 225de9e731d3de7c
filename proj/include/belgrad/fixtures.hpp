#pragma once

#include <string>
#include <vector>

#include "belgrad/model.hpp"

namespace belgrad {

/// A named model together with the defaults the harness uses for it.
struct Fixture {
  std::string name;
  SdeModel model;
  int regularization_level = 8;
  Vec default_x;
  double audit_radius = 50.0;
  // added to the radial audit grid, e.g. points resolving narrow features
  std::vector<Vec> extra_audit_points;
};

/// bm: d = 2, b = 0, sigma = I.
Fixture brownian_fixture();
/// ou: d = 1, b = -x, sigma = 1.
Fixture ou_fixture();
/// sinsq: d = 1, b = x sin x^2, sigma = sqrt 2.
Fixture sinsq_fixture();
/// The exported counterexample drift; theta in (0, 1).
Fixture counterexample_fixture(double theta = 0.9);

/// "bm", "ou", "sinsq" or "counterexample". Throws std::invalid_argument for
/// anything else.
Fixture fixture_by_name(const std::string& name, double theta = 0.9);
const std::vector<std::string>& fixture_names();

/// E cos(lambda X(t)) for the ou fixture started at x, and its x-derivative.
/// X(t) is Gaussian with mean x e^-t and variance (1 - e^-2t)/2.
double ou_cos_mean(double lambda, double t, double x);
double ou_cos_gradient(double lambda, double t, double x);

}  // namespace belgrad

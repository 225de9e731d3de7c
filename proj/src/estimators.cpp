#include "belgrad/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "belgrad/parallel.hpp"

namespace belgrad {

double TestFunction::operator()(const Vec& y) const {
  const double v = eval(y);
  if (!(std::abs(v) <= sup_norm))
    throw std::domain_error("test function '" + name + "' exceeded its declared sup norm");
  return v;
}

TestFunction constant_function(double c) {
  return TestFunction{"const", [c](const Vec&) { return c; }, std::abs(c)};
}

TestFunction cos_first(double lambda) {
  return TestFunction{"cos", [lambda](const Vec& y) { return std::cos(lambda * y(0)); }, 1.0};
}

TestFunction sin_first(double lambda) {
  return TestFunction{"sin", [lambda](const Vec& y) { return std::sin(lambda * y(0)); }, 1.0};
}

TestFunction tanh_first(double scale) {
  return TestFunction{"tanh", [scale](const Vec& y) { return std::tanh(y(0) / scale); }, 1.0};
}

TestFunction squared_norm() {
  return TestFunction{"sqnorm", [](const Vec& y) { return y.squaredNorm(); },
                      std::numeric_limits<double>::infinity()};
}

TestFunction test_function_by_name(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  double param = 1.0;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      param = std::stod(spec.substr(colon + 1), &used);
      if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad test function parameter in '" + spec + "'");
    }
  }
  TestFunction phi;
  if (name == "cos") phi = cos_first(param);
  else if (name == "sin") phi = sin_first(param);
  else if (name == "sinpi") phi = sin_first(std::numbers::pi * param);
  else if (name == "tanh") phi = tanh_first(param);
  else if (name == "const") phi = constant_function(param);
  else throw std::invalid_argument("unknown test function '" + name + "' (cos, sin, sinpi, tanh, const)");
  phi.name = spec;
  return phi;
}

namespace {

PathEnsemble run_to(const RegularizedModel& model, double t, const Vec& x, const Vec& h, SimConfig cfg,
                    bool tangent) {
  if (!(t > 0.0)) throw std::invalid_argument("estimator: t must be positive");
  cfg.t_final = t;
  cfg.dt = std::min(cfg.dt, t);
  cfg.track_tangent = tangent;
  PathEnsemble e = simulate_ensemble(model, x, h, cfg);
  e.require_no_explosions();
  return e;
}

Vec first_axis(const RegularizedModel& model) { return unit_vec(model.coefficients.dim, 0); }

}  // namespace

Estimate estimate_P(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, SimConfig cfg) {
  const PathEnsemble e = run_to(model, t, x, first_axis(model), cfg, false);
  std::vector<double> samples(e.n_paths());
  for (std::size_t k = 0; k < e.n_paths(); ++k) samples[k] = phi(e.paths[k].x);
  return estimate_from_samples(samples);
}

Estimate estimate_S(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, SimConfig cfg) {
  const PathEnsemble e = run_to(model, t, x, first_axis(model), cfg, false);
  std::vector<double> samples(e.n_paths());
  for (std::size_t k = 0; k < e.n_paths(); ++k) samples[k] = phi(e.paths[k].x) * std::exp(-e.paths[k].beta);
  return estimate_from_samples(samples);
}

BelEstimate bel_gradient_S(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x,
                           const Vec& h, SimConfig cfg) {
  const PathEnsemble e = run_to(model, t, x, h, cfg, true);
  const std::size_t n = e.n_paths();
  std::vector<double> s1(n), s2(n), st(n);
  for (std::size_t k = 0; k < n; ++k) {
    const AugmentedPath& p = e.paths[k];
    const double weighted = phi(p.x) * std::exp(-p.beta);
    s1[k] = weighted * p.bel / t;
    s2[k] = -weighted * p.i2();
    st[k] = s1[k] + s2[k];
  }
  return BelEstimate{estimate_from_samples(s1), estimate_from_samples(s2), estimate_from_samples(st)};
}

Estimate duhamel_gradient_P(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x,
                            const Vec& h, SimConfig cfg, const DuhamelConfig& duhamel) {
  if (!(t > 0.0)) throw std::invalid_argument("duhamel_gradient_P: t must be positive");
  if (duhamel.s_grid_size < 2) throw std::invalid_argument("duhamel_gradient_P: s_grid_size must be >= 2");
  if (duhamel.n_inner == 0) throw std::invalid_argument("duhamel_gradient_P: n_inner must be positive");
  if (!phi.bounded()) throw std::invalid_argument("duhamel_gradient_P: test function must be bounded");
  const auto n_nodes = static_cast<std::size_t>(duhamel.s_grid_size);
  const double work = static_cast<double>(cfg.n_paths) * static_cast<double>(n_nodes) *
                      static_cast<double>(duhamel.n_inner);
  if (work > duhamel.path_budget)
    throw BudgetError("duhamel_gradient_P: outer x nodes x inner = " + std::to_string(work) +
                      " exceeds the path budget " + std::to_string(duhamel.path_budget));

  std::vector<double> r(n_nodes), weight(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(n_nodes);
    r[j] = t * u * u;
    weight[j] = 2.0 * t * u / static_cast<double>(n_nodes);
  }

  SimConfig outer_cfg = cfg;
  outer_cfg.t_final = t;
  outer_cfg.dt = std::min(cfg.dt, t);
  outer_cfg.track_tangent = true;
  outer_cfg.snapshot_times = r;
  const PathEnsemble outer = simulate_ensemble(model, x, h, outer_cfg);
  outer.require_no_explosions();

  const PathIntegrator inner_integrator(model, false);
  const auto inner_key = derive_key(cfg.master_seed, StreamTag::kInnerPaths);
  std::vector<std::vector<double>> inner_grids(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j) inner_grids[j] = time_grid(t - r[j], std::min(outer_cfg.dt, t - r[j]));
  const Vec zero = Vec::Zero(model.coefficients.dim);
  const std::vector<std::size_t> no_snapshots;

  std::vector<double> samples(outer.n_paths());
  for_each_index(outer.n_paths(), cfg.workers, true, [&](std::size_t k) {
    const AugmentedPath& end = outer.paths[k];
    double sample = phi(end.x) * std::exp(-end.beta) * (end.bel / t - end.i2());
    for (std::size_t j = 0; j < n_nodes; ++j) {
      const AugmentedPath& node = outer.snapshot(k, j);
      // psi(y) = P_{t - r_j} phi(y), one inner batch per (outer path, node)
      const TestFunction psi{
          "inner", [&, k, j](const Vec& y) {
            CompensatedSum sum;
            for (std::size_t i = 0; i < duhamel.n_inner; ++i) {
              const std::uint64_t stream = (k * n_nodes + j) * duhamel.n_inner + i;
              const AugmentedPath p = simulate_path(inner_integrator, y, zero, inner_grids[j], no_snapshots,
                                                    NormalStream(inner_key, stream), nullptr);
              if (p.exploded) throw ExplosionError("duhamel_gradient_P: inner path exploded");
              sum.add(phi(p.x));
            }
            return sum.value() / static_cast<double>(duhamel.n_inner);
          },
          phi.sup_norm};
      const double g = model.potential.value(node.x) * psi(node.x);
      sample += weight[j] * g * std::exp(-node.beta) * (node.bel / r[j] - node.i2());
    }
    samples[k] = sample;
  });
  return estimate_from_samples(samples);
}

double default_fd_step(const Vec& x) { return 1e-3 * (1.0 + x.norm()); }

namespace {

Estimate fd_gradient(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, const Vec& h,
                     double eps, SimConfig cfg, bool killed) {
  if (!(eps > 0.0)) throw std::invalid_argument("fd_gradient: eps must be positive");
  const PathEnsemble plus = run_to(model, t, x + eps * h, h, cfg, false);
  const PathEnsemble minus = run_to(model, t, x - eps * h, h, cfg, false);
  std::vector<double> samples(plus.n_paths());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double a = phi(plus.paths[k].x);
    double b = phi(minus.paths[k].x);
    if (killed) {
      a *= std::exp(-plus.paths[k].beta);
      b *= std::exp(-minus.paths[k].beta);
    }
    samples[k] = (a - b) / (2.0 * eps);
  }
  return estimate_from_samples(samples);
}

}  // namespace

Estimate fd_gradient_P(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, const Vec& h,
                       double eps, SimConfig cfg) {
  return fd_gradient(model, phi, t, x, h, eps, cfg, false);
}

Estimate fd_gradient_S(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, const Vec& h,
                       double eps, SimConfig cfg) {
  return fd_gradient(model, phi, t, x, h, eps, cfg, true);
}

MomentReport moment_audit(const RegularizedModel& model, const Vec& x, double t, SimConfig cfg) {
  if (t < 0.0) throw std::invalid_argument("moment_audit: t must be nonnegative");
  const WeightSpec& w = model.base.weight;
  const double c0 = w.c0();
  const double L = model.base.lyapunov_L;
  const double v0 = lyapunov_V(w, x);
  const double v0_4 = std::pow(v0, 4);

  MomentReport report;
  report.weight.name = "weight";
  report.fourth_power.name = "fourth_power";
  report.regularized_fourth.name = "regularized_fourth";
  report.weight.bound = std::exp(c0 * L * t) * v0;
  report.fourth_power.bound = std::exp(4.0 * c0 * L * t) * v0_4;
  report.regularized_fourth.bound =
      std::pow(model.c1, 4) * std::exp(4.0 * c0 * model.h1_inflation * L * t) * v0_4;

  if (t == 0.0) {
    const double vn = model.potential.value(x);
    report.weight.lhs = Estimate{v0, 0.0, cfg.n_paths};
    report.fourth_power.lhs = Estimate{v0_4, 0.0, cfg.n_paths};
    report.regularized_fourth.lhs = Estimate{std::pow(vn, 4), 0.0, cfg.n_paths};
    return report;
  }

  const RegularizedModel base = unregularized(model.base);
  const PathEnsemble e = run_to(base, t, x, unit_vec(base.coefficients.dim, 0), cfg, false);
  std::vector<double> s1(e.n_paths()), s4(e.n_paths());
  for (std::size_t k = 0; k < e.n_paths(); ++k) {
    const double v = lyapunov_V(w, e.paths[k].x);
    s1[k] = v;
    s4[k] = std::pow(v, 4);
  }
  report.weight.lhs = estimate_from_samples(s1);
  report.fourth_power.lhs = estimate_from_samples(s4);

  const PathEnsemble en = run_to(model, t, x, unit_vec(model.coefficients.dim, 0), cfg, false);
  std::vector<double> sn(en.n_paths());
  for (std::size_t k = 0; k < en.n_paths(); ++k) sn[k] = std::pow(model.potential.value(en.paths[k].x), 4);
  report.regularized_fourth.lhs = estimate_from_samples(sn);
  return report;
}

double RatioTable::max_weighted() const {
  double m = 0.0;
  for (const RatioRow& row : rows) m = std::max(m, row.weighted);
  return m;
}

double RatioTable::stability() const {
  std::map<double, double> per_t;
  for (const RatioRow& row : rows) per_t[row.t] = std::max(per_t[row.t], row.weighted);
  if (per_t.empty()) return 1.0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& [t, m] : per_t) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

RatioTable theorem_ratio_sweep(const RegularizedModel& model, const std::vector<TestFunction>& phis,
                               const std::vector<double>& ts, const std::vector<Vec>& xs, SimConfig cfg, double eps) {
  const int d = model.coefficients.dim;
  const double nu = model.base.nu;
  RatioTable table;
  for (const TestFunction& phi : phis) {
    if (!phi.bounded() || !(phi.sup_norm > 0.0))
      throw std::invalid_argument("theorem_ratio_sweep: test functions must be bounded and nonzero");
    for (double t : ts) {
      if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("theorem_ratio_sweep: t must lie in (0, 1]");
      for (const Vec& x : xs) {
        const double step = eps > 0.0 ? eps : default_fd_step(x);
        RatioRow row;
        row.phi = phi.name;
        row.t = t;
        row.x = x;
        for (int axis = 0; axis < d; ++axis) {
          const Estimate g = fd_gradient_P(model, phi, t, x, unit_vec(d, axis), step, cfg);
          if (axis == 0 || std::abs(g.value) > std::abs(row.gradient.value)) {
            row.gradient = g;
            row.best_axis = axis;
          }
        }
        const double v = lyapunov_V(model.base.weight, x);
        row.unweighted = std::sqrt(t) * std::abs(row.gradient.value) / phi.sup_norm;
        row.weighted = std::sqrt(t * nu) * std::abs(row.gradient.value) / (v * v * phi.sup_norm);
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

}  // namespace belgrad

#include "belgrad/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "belgrad/counterexample_checks.hpp"

namespace belgrad::harness {

namespace {

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string describe(const Estimate& e) {
  std::ostringstream s;
  s.precision(6);
  s << e.value << " +- " << e.stderr();
  return s.str();
}

std::string point(const Vec& x) {
  std::string s;
  for (int i = 0; i < x.size(); ++i) s += (i ? ":" : "") + format_short(x[i]);
  return s;
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

Check agreement_check(const std::string& name, const Estimate& a, const Estimate& b) {
  const double gap = std::abs(a.value - b.value);
  const double allowed = 3.0 * combined_stderr(a, b);
  return Check{name, gap <= allowed,
               describe(a) + " vs " + describe(b) + ", |diff| " + num(gap) + " <= " + num(allowed)};
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void SuiteResult::append(const SuiteResult& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  for (const auto& [k, v] : other.scalars) scalars[k] = v;
}

SuiteResult hypotheses_suite(const Fixture& fixture, const RegularizedModel& regularized, int n_radial,
                             int n_random) {
  SuiteResult out;
  std::vector<Vec> grid = audit_grid(fixture.model.dim, fixture.audit_radius, n_radial, n_random);
  grid.insert(grid.end(), fixture.extra_audit_points.begin(), fixture.extra_audit_points.end());
  auto report_rows = [&](const std::string& which, const HypothesisReport& rep, int level) {
    const std::string p = Params().add("model", fixture.name).add("coefficients", which).add("n", level).str();
    out.rows.push_back(exact_row("h1_max_residual", p, rep.h1_max_residual));
    out.rows.push_back(exact_row("h2_max_residual", p, rep.h2_max_residual));
    out.rows.push_back(exact_row("h3_min_eigenvalue", p, rep.h3_min_eigenvalue));
    out.rows.push_back(exact_row("n_points", p, rep.n_points));
    out.checks.push_back(Check{fixture.name + " " + which + " H1-H3", rep.passes(),
                               "h1 " + num(rep.h1_max_residual) + ", h2 " + num(rep.h2_max_residual) + ", h3 " +
                                   num(rep.h3_min_eigenvalue) + " on " + std::to_string(rep.n_points) + " points"});
  };
  report_rows("base", check_hypotheses(fixture.model, grid), 0);
  // the regularized coefficients satisfy H1 with C L; H2 is audited against the same weight
  report_rows("regularized", check_hypotheses(regularized.coefficients, grid), regularized.n);
  out.rows.push_back(exact_row("c1", Params().add("model", fixture.name).add("n", regularized.n).str(), regularized.c1));
  out.rows.push_back(exact_row("h1_inflation", Params().add("model", fixture.name).add("n", regularized.n).str(),
                               regularized.h1_inflation));
  return out;
}

SuiteResult supermartingale_suite(const RegularizedModel& model, const std::string& label, const Vec& x,
                                  const Vec& h, const std::vector<double>& ts, SimConfig cfg) {
  if (ts.empty()) throw std::invalid_argument("supermartingale_suite: no times");
  SuiteResult out;
  cfg.t_final = *std::max_element(ts.begin(), ts.end());
  cfg.snapshot_times = ts;
  cfg.track_tangent = true;
  const PathEnsemble e = simulate_ensemble(model, x, h, cfg);
  e.require_no_explosions();
  const double bound = h.squaredNorm();
  for (std::size_t j = 0; j < ts.size(); ++j) {
    std::vector<double> s(e.n_paths());
    for (std::size_t k = 0; k < e.n_paths(); ++k) {
      const AugmentedPath& p = e.snapshot(k, j);
      s[k] = std::exp(-p.beta) * p.eta.squaredNorm();
    }
    const Estimate est = estimate_from_samples(s);
    const std::string p =
        Params().add("model", label).add("n", model.n).add("t", ts[j]).add("x", x).add("h", h).str();
    out.rows.push_back(estimate_row("tangent_weight", p, est, cfg.dt, cfg.master_seed));
    out.checks.push_back(Check{label + " E e^-beta |eta|^2 <= |h|^2 at t=" + format_short(ts[j]),
                               est.value <= bound + 3.0 * est.stderr(),
                               describe(est) + " vs |h|^2 = " + num(bound)});
  }
  return out;
}

SuiteResult simulate_suite(const RegularizedModel& model, const std::string& label, const Vec& x, SimConfig cfg,
                           const std::filesystem::path& dump) {
  const double t = cfg.t_final;
  const Vec h = unit_vec(model.coefficients.dim, 0);
  SuiteResult out = supermartingale_suite(model, label, x, h, {0.25 * t, 0.5 * t, t}, cfg);
  cfg.snapshot_times.clear();
  const PathEnsemble e = simulate_ensemble(model, x, h, cfg);
  if (!dump.empty()) write_ensemble(dump, e);
  const std::string p = Params().add("model", label).add("n", model.n).add("t", t).add("x", x).str();
  for (int i = 0; i < model.coefficients.dim; ++i) {
    std::vector<double> s(e.n_paths());
    for (std::size_t k = 0; k < e.n_paths(); ++k) s[k] = e.paths[k].x[i];
    out.rows.push_back(estimate_row("mean_x" + std::to_string(i), p, estimate_from_samples(s), cfg.dt, cfg.master_seed));
  }
  std::vector<double> killing(e.n_paths());
  for (std::size_t k = 0; k < e.n_paths(); ++k) killing[k] = std::exp(-e.paths[k].beta);
  out.rows.push_back(estimate_row("mean_killing_weight", p, estimate_from_samples(killing), cfg.dt, cfg.master_seed));
  out.rows.push_back(CsvRow{"exploded_paths", p, static_cast<double>(e.n_exploded()), 0.0, e.n_paths(), cfg.dt,
                            cfg.master_seed});
  out.checks.push_back(Check{label + " no explosions", e.n_exploded() == 0,
                             std::to_string(e.n_exploded()) + " of " + std::to_string(e.n_paths())});
  return out;
}

SuiteResult gradient_suite(const RegularizedModel& model, const std::string& label, const TestFunction& phi, double t,
                           const Vec& x, const Vec& h, const GradientOptions& options) {
  SuiteResult out;
  const SimConfig& cfg = options.cfg;
  const double eps = options.fd_eps > 0.0 ? options.fd_eps : default_fd_step(x);
  const std::string p = Params()
                            .add("model", label)
                            .add("n", model.n)
                            .add("phi", phi.name)
                            .add("t", t)
                            .add("x", x)
                            .add("h", h)
                            .add("eps", eps)
                            .str();

  const BelEstimate bel = bel_gradient_S(model, phi, t, x, h, cfg);
  const Estimate fd_s = fd_gradient_S(model, phi, t, x, h, eps, cfg);
  out.rows.push_back(estimate_row("bel_S_i1", p, bel.i1, cfg.dt, cfg.master_seed));
  out.rows.push_back(estimate_row("bel_S_i2", p, bel.i2, cfg.dt, cfg.master_seed));
  out.rows.push_back(estimate_row("bel_S", p, bel.total, cfg.dt, cfg.master_seed));
  out.rows.push_back(estimate_row("fd_S", p, fd_s, cfg.dt, cfg.master_seed));
  out.checks.push_back(agreement_check(label + " BEL D S_t phi vs finite difference", bel.total, fd_s));

  SimConfig outer = cfg;
  outer.n_paths = options.duhamel_outer;
  const Estimate duhamel = duhamel_gradient_P(model, phi, t, x, h, outer, options.duhamel);
  const Estimate fd_p = fd_gradient_P(model, phi, t, x, h, eps, cfg);
  const std::string pd = Params()
                             .add("model", label)
                             .add("n", model.n)
                             .add("phi", phi.name)
                             .add("t", t)
                             .add("x", x)
                             .add("h", h)
                             .add("nodes", options.duhamel.s_grid_size)
                             .add("inner", static_cast<int>(options.duhamel.n_inner))
                             .str();
  out.rows.push_back(estimate_row("duhamel_P", pd, duhamel, cfg.dt, cfg.master_seed));
  out.rows.push_back(estimate_row("fd_P", p, fd_p, cfg.dt, cfg.master_seed));
  out.checks.push_back(agreement_check(label + " Duhamel D P_t phi vs finite difference", duhamel, fd_p));
  return out;
}

SuiteResult ou_closed_form_suite(const RegularizedModel& ou, double lambda, double t, const std::vector<double>& xs,
                                 SimConfig cfg, const DuhamelConfig& duhamel) {
  SuiteResult out;
  const TestFunction phi = cos_first(lambda);
  for (double x0 : xs) {
    const Vec x = make_vec({x0});
    const Estimate est = duhamel_gradient_P(ou, phi, t, x, unit_vec(1, 0), cfg, duhamel);
    const double exact = ou_cos_gradient(lambda, t, x0);
    const std::string p = Params()
                              .add("model", "ou")
                              .add("n", ou.n)
                              .add("lambda", lambda)
                              .add("t", t)
                              .add("x", x0)
                              .add("nodes", duhamel.s_grid_size)
                              .add("inner", static_cast<int>(duhamel.n_inner))
                              .str();
    out.rows.push_back(estimate_row("duhamel_P", p, est, cfg.dt, cfg.master_seed));
    out.rows.push_back(exact_row("closed_form", p, exact));
    if (std::abs(exact) < 1e-12) {
      out.checks.push_back(Check{"ou closed form at x=" + format_short(x0) + " (exact 0)",
                                 std::abs(est.value) <= 3.0 * est.stderr(),
                                 describe(est) + ", |estimate| <= 3 stderr"});
    } else {
      const double rel = std::abs(est.value / exact - 1.0);
      out.checks.push_back(Check{"ou closed form at x=" + format_short(x0), rel <= 0.05,
                                 describe(est) + " vs " + num(exact) + ", relative error " + num(rel)});
    }
  }
  return out;
}

SuiteResult moment_suite(const RegularizedModel& model, const std::string& label, const std::vector<double>& ts,
                         const std::vector<Vec>& xs, SimConfig cfg) {
  SuiteResult out;
  for (double t : ts) {
    for (const Vec& x : xs) {
      const MomentReport rep = moment_audit(model, x, t, cfg);
      const std::string p = Params().add("model", label).add("n", model.n).add("t", t).add("x", x).str();
      for (const MomentCheck* c : {&rep.weight, &rep.fourth_power, &rep.regularized_fourth}) {
        out.rows.push_back(estimate_row(c->name, p, c->lhs, cfg.dt, cfg.master_seed));
        out.rows.push_back(exact_row(c->name + "_bound", p, c->bound));
        out.checks.push_back(Check{label + " " + c->name + " t=" + format_short(t) + " x=" + point(x),
                                   c->holds(), describe(c->lhs) + " <= " + num(c->bound)});
      }
    }
  }
  return out;
}

SuiteResult ratio_sweep_suite(const RegularizedModel& model, const std::string& label,
                              const std::vector<TestFunction>& phis, const std::vector<double>& ts,
                              const std::vector<Vec>& xs, SimConfig cfg, double eps) {
  SuiteResult out;
  const RatioTable table = theorem_ratio_sweep(model, phis, ts, xs, cfg, eps);
  for (const RatioRow& r : table.rows) {
    const std::string p = Params()
                              .add("model", label)
                              .add("n", model.n)
                              .add("phi", r.phi)
                              .add("t", r.t)
                              .add("x", r.x)
                              .add("axis", r.best_axis)
                              .str();
    out.rows.push_back(estimate_row("fd_gradient_P", p, r.gradient, cfg.dt, cfg.master_seed));
    out.rows.push_back(CsvRow{"weighted_ratio", p, r.weighted, 0.0, r.gradient.n_paths, cfg.dt, cfg.master_seed});
    out.rows.push_back(CsvRow{"unweighted_ratio", p, r.unweighted, 0.0, r.gradient.n_paths, cfg.dt, cfg.master_seed});
  }
  const double constant = table.max_weighted();
  const double stability = table.stability();
  const std::string p = Params().add("model", label).add("n", model.n).str();
  out.rows.push_back(CsvRow{"max_weighted_ratio", p, constant, 0.0, cfg.n_paths, cfg.dt, cfg.master_seed});
  out.rows.push_back(CsvRow{"stability", p, stability, 0.0, cfg.n_paths, cfg.dt, cfg.master_seed});
  out.scalars[label + ".max_weighted"] = constant;
  out.scalars[label + ".stability"] = stability;
  out.checks.push_back(Check{label + " weighted ratio stable across t", stability < 10.0,
                             "constant " + num(constant) + ", max/min over t " + num(stability) + " < 10"});
  return out;
}

SuiteResult failure_demo_suite(const RegularizedModel& model, const TestFunction& phi,
                               double t, const std::vector<int>& ns, double eps, SimConfig cfg,
                               double weighted_bound) {
  if (ns.size() < 2) throw std::invalid_argument("failure_demo_suite: need at least two indices");
  SuiteResult out;
  cfg.track_tangent = false;
  const double nu = model.base.nu;
  std::vector<Estimate> proxies;
  double worst_weighted = 0.0;
  for (int n : ns) {
    const Vec x = make_vec({Counterexample::c(n)});
    const Estimate g = fd_gradient_P(model, phi, t, x, unit_vec(1, 0), eps, cfg);
    const double scale = std::sqrt(t) / phi.sup_norm;
    const Estimate proxy{scale * std::abs(g.value), scale * g.stderr(), g.n_paths};
    const double v = lyapunov_V(model.base.weight, x);
    const double weighted = std::sqrt(t * nu) * std::abs(g.value) / (v * v * phi.sup_norm);
    worst_weighted = std::max(worst_weighted, weighted);
    const std::string p =
        Params().add("model", "counterexample").add("n_reg", model.n).add("phi", phi.name).add("t", t).add("c_n", n).add("eps", eps).str();
    out.rows.push_back(estimate_row("fd_gradient_P", p, g, cfg.dt, cfg.master_seed));
    out.rows.push_back(estimate_row("unweighted_proxy", p, proxy, cfg.dt, cfg.master_seed));
    out.rows.push_back(CsvRow{"weighted_ratio", p, weighted, 0.0, g.n_paths, cfg.dt, cfg.master_seed});
    proxies.push_back(proxy);
  }
  for (std::size_t i = 1; i < proxies.size(); ++i) {
    const double diff = proxies[i].value - proxies[i - 1].value;
    const double allowed = 3.0 * combined_stderr(proxies[i], proxies[i - 1]);
    out.checks.push_back(Check{"unweighted proxy grows from n=" + std::to_string(ns[i - 1]) + " to n=" +
                                   std::to_string(ns[i]),
                               diff > allowed, "step " + num(diff) + " > 3 combined stderr " + num(allowed)});
  }
  out.checks.push_back(Check{"weighted ratio bounded at the same points", worst_weighted <= weighted_bound,
                             "max " + num(worst_weighted) + " <= " + num(weighted_bound)});
  return out;
}

SuiteResult counterexample_suite(const Counterexample& cx, int n_max, double x_max,
                                 const std::filesystem::path& out_dir) {
  SuiteResult out;
  const LemmaReport rep = verify_lemma(cx, n_max, x_max);
  const std::string theta = format_short(cx.theta());
  auto add = [&](const std::string& name, bool ok, const std::string& detail) {
    out.checks.push_back(Check{name, ok, detail});
  };
  add("interval ordering on [n0, n_max]", rep.ordering_holds, "n0 = " + std::to_string(rep.n0));
  add("tail bracket a_n/2 <= |R_n| <= a_{n-1}/2", rep.tail_brackets_hold,
      "n in [" + std::to_string(rep.n0) + ", " + std::to_string(rep.n_max) + "]");
  add("A_n + B_n = R_n / 2", rep.max_ab_error <= 1e-10, "max error " + num(rep.max_ab_error));
  add("C_n + D_n closed form", rep.max_cd_error <= 1e-10, "max error " + num(rep.max_cd_error));
  const bool vanish = rep.blocks.back().excursion < rep.blocks.front().excursion;
  add("Gamma_n decreasing toward 0", rep.excursions_decrease && vanish,
      "Gamma_n0 = " + num(rep.blocks.front().excursion) + ", Gamma_nmax = " + num(rep.blocks.back().excursion));
  for (const SeriesLimit* s : {&rep.ab_series, &rep.cd_series, &rep.block_series})
    add("series " + s->name + " converges", s->spread <= 1e-8, "spread of limit estimates " + num(s->spread));
  add("sup |u| stable under doubling", rep.sup_u_change <= 1e-4, "last change " + num(rep.sup_u_change));
  add("|u'(c_n)| >= n^gamma / 2", rep.growth_holds,
      "u'(c_nmax) = " + num(rep.growth.back().u_prime) + ", onset n1 = " + std::to_string(rep.onset_n1));
  add("int e^B f = 0", std::abs(rep.balance) <= 1e-10, "balance " + num(rep.balance));
  add("u continuous at 0", rep.u_jump <= 1e-8, "jump " + num(rep.u_jump));
  add("u' continuous at 0", rep.du_jump <= 1e-8 && rep.du_jump_exact <= 1e-8,
      "difference quotients " + num(rep.du_jump) + ", closed forms " + num(rep.du_jump_exact));

  const std::vector<double> sample = counterexample_sample_points(cx, 28, 6);
  const OdeReport ode = verify_ode(cx, sample);
  add("ODE residual u'' + b u' - f < 1e-8", ode.max_residual < 1e-8,
      num(ode.max_residual) + " at x = " + num(ode.worst_x) + " over " + std::to_string(ode.n_points) + " points");

  const ExportedConstants ec = calibrate_export_constants(cx);
  const SdeModel model = export_as_sde_model(cx, ec);
  std::vector<Vec> grid = audit_grid(1, 50.0, 2000, 0);
  for (double x : counterexample_sample_points(cx, 60, 8)) grid.push_back(make_vec({x}));
  const HypothesisReport hyp = check_hypotheses(model, grid);
  add("exported model passes H1-H3", hyp.passes(),
      "k0 = " + num(ec.k0) + ", L = " + num(ec.lyapunov_L) + ", h1 " + num(hyp.h1_max_residual) + ", h2 " +
          num(hyp.h2_max_residual) + ", h3 " + num(hyp.h3_min_eigenvalue));

  const std::string p = Params().add("theta", cx.theta()).add("n_max", n_max).str();
  out.rows.push_back(exact_row("n0", p, rep.n0));
  out.rows.push_back(exact_row("onset_n1", p, rep.onset_n1));
  out.rows.push_back(exact_row("k", p, cx.k()));
  out.rows.push_back(exact_row("k0", p, ec.k0));
  out.rows.push_back(exact_row("lyapunov_L", p, ec.lyapunov_L));
  out.rows.push_back(exact_row("max_ab_error", p, rep.max_ab_error));
  out.rows.push_back(exact_row("max_cd_error", p, rep.max_cd_error));
  out.rows.push_back(exact_row("ode_max_residual", p, ode.max_residual));
  out.rows.push_back(exact_row("balance", p, rep.balance));
  out.scalars["n0"] = rep.n0;
  out.scalars["onset_n1"] = rep.onset_n1;

  if (!out_dir.empty()) {
    std::vector<std::vector<std::string>> growth;
    for (const GrowthRow& g : rep.growth)
      growth.push_back({std::to_string(g.n), format_number(g.c), format_number(g.u_prime), format_number(g.lower),
                        yes_no(g.holds()), theta});
    write_table_csv(out_dir / "growth.csv", {"n", "c_n", "u_prime", "lower_bound", "holds", "theta"}, growth,
                    "derivative growth at c_n", {{1, 3}, {1, 4}});

    std::vector<std::vector<std::string>> bounded;
    for (const auto& [xm, sup] : rep.sup_u) bounded.push_back({format_number(xm), format_number(sup), theta});
    write_table_csv(out_dir / "boundedness.csv", {"x_max", "sup_abs_u", "theta"}, bounded, "sup |u| on [0, x_max]",
                    {{1, 2}});

    std::vector<std::vector<std::string>> blocks;
    for (const BlockRow& b : rep.blocks)
      blocks.push_back({std::to_string(b.n), format_number(b.ab_quadrature), format_number(b.ab_identity),
                        format_number(b.cd_quadrature), format_number(b.cd_identity), format_number(b.excursion),
                        theta});
    write_table_csv(out_dir / "blocks.csv",
                    {"n", "ab_quadrature", "ab_identity", "cd_quadrature", "cd_identity", "excursion", "theta"}, blocks,
                    "block sums", {{1, 2}, {1, 4}, {1, 6}});
    write_summary(out_dir / "summary.txt", "counterexample theta=" + theta + " n_max=" + std::to_string(n_max), out);
  }
  return out;
}

void write_summary(const std::filesystem::path& file, const std::string& title, const SuiteResult& result) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "# " << title << "\n# generated " << stamp << "\n";
  for (const Check& c : result.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  out << (result.passed() ? "ALL PASS" : "SOME CHECKS FAILED") << "\n";
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::vector<Vec> parse_points(const std::string& text, int dim) {
  std::vector<Vec> points;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    std::vector<double> comps;
    std::stringstream one(item);
    std::string c;
    while (std::getline(one, c, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad number '" + c + "' in point list '" + text + "'");
      }
      if (c.find_first_not_of(" \t", used) != std::string::npos)
        throw std::invalid_argument("bad number '" + c + "' in point list '" + text + "'");
      comps.push_back(v);
    }
    if (comps.size() == 1) {
      Vec p = zero_vec(dim);
      p[0] = comps[0];
      points.push_back(p);
    } else if (static_cast<int>(comps.size()) == dim) {
      Vec p(dim);
      for (int i = 0; i < dim; ++i) p[i] = comps[i];
      points.push_back(p);
    } else {
      throw std::invalid_argument("point '" + item + "' has " + std::to_string(comps.size()) +
                                  " components, model dimension is " + std::to_string(dim));
    }
  }
  if (points.empty()) throw std::invalid_argument("empty point list");
  return points;
}

}  // namespace belgrad::harness

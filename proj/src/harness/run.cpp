#include <algorithm>
#include <iostream>
#include <sstream>

#include "belgrad/harness/config.hpp"
#include "belgrad/harness/experiments.hpp"
#include "belgrad/regularization.hpp"

namespace belgrad::harness {

namespace {

std::vector<TestFunction> parse_phis(const std::string& text) {
  std::vector<TestFunction> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) out.push_back(test_function_by_name(item));
  if (out.empty()) throw std::invalid_argument("phi: empty list");
  return out;
}

struct Context {
  const ExperimentConfig& cfg;
  Fixture fixture;
  std::vector<int> levels;
  SimConfig sim;
};

Context make_context(const ExperimentConfig& cfg, const std::string& model) {
  Context ctx{cfg, fixture_by_name(model, cfg.theta), cfg.levels, {}};
  if (ctx.levels.empty()) ctx.levels = {ctx.fixture.regularization_level};
  ctx.sim.dt = cfg.dt;
  ctx.sim.n_paths = cfg.paths;
  ctx.sim.master_seed = cfg.seed;
  ctx.sim.workers = effective_workers(cfg);
  return ctx;
}

std::vector<Vec> points_or(const Context& ctx, const std::vector<Vec>& fallback) {
  return ctx.cfg.x.empty() ? fallback : parse_points(ctx.cfg.x, ctx.fixture.model.dim);
}

// Runs the command for one fixture and writes <command>_<model>.csv and its summary.
SuiteResult run_for_model(const ExperimentConfig& cfg, const std::string& command, const std::string& model) {
  Context ctx = make_context(cfg, model);
  const Fixture& fx = ctx.fixture;
  const int d = fx.model.dim;
  SuiteResult all;
  for (int level : ctx.levels) {
    const RegularizedModel rm = regularize(fx.model, level);
    if (command == "check-hypotheses") {
      all.append(hypotheses_suite(fx, rm));
    } else if (command == "simulate") {
      int index = 0;
      for (double t : cfg.ts) {
        for (const Vec& x : points_or(ctx, {fx.default_x})) {
          SimConfig sim = ctx.sim;
          sim.t_final = t;
          const std::string dump = "ensemble_" + model + "_n" + std::to_string(level) + "_" + std::to_string(index++) + ".bin";
          all.append(simulate_suite(rm, fx.name, x, sim, cfg.out / dump));
        }
      }
    } else if (command == "gradient") {
      const TestFunction phi = parse_phis(cfg.phi).front();
      GradientOptions opt;
      opt.cfg = ctx.sim;
      opt.duhamel_outer = std::max<std::size_t>(cfg.paths / 4, 100);
      opt.duhamel.s_grid_size = 16;
      opt.duhamel.n_inner = 1;
      for (double t : cfg.ts) {
        for (const Vec& x : points_or(ctx, {fx.default_x})) {
          SimConfig sim = ctx.sim;
          sim.t_final = t;
          opt.cfg = sim;
          all.append(gradient_suite(rm, fx.name, phi, t, x, unit_vec(d, 0), opt));
          if (fx.name == "ou" && phi.name.rfind("cos", 0) == 0) {
            const double lambda = phi.name == "cos" ? 1.0 : std::stod(phi.name.substr(4));
            all.rows.push_back(exact_row(
                "closed_form", Params().add("model", "ou").add("phi", phi.name).add("t", t).add("x", x).str(),
                ou_cos_gradient(lambda, t, x[0])));
          }
        }
      }
    } else if (command == "moment-audit") {
      std::vector<Vec> xs;
      for (double r : {0.0, 1.0, 2.0, 4.0}) xs.push_back(r * unit_vec(d, 0));
      all.append(moment_suite(rm, fx.name, cfg.ts, points_or(ctx, xs), ctx.sim));
    } else if (command == "ratio-sweep") {
      std::vector<Vec> xs;
      for (double r : {0.0, 1.0, 2.0, 4.0, 8.0}) xs.push_back(r * unit_vec(d, 0));
      std::vector<double> ts;
      for (double t : cfg.ts) ts.push_back(std::min(t, 1.0));
      all.append(ratio_sweep_suite(rm, fx.name, parse_phis(cfg.phi), ts, points_or(ctx, xs), ctx.sim));
    } else {
      throw std::invalid_argument("unknown command " + command);
    }
  }
  const std::filesystem::path csv = cfg.out / (command + "_" + model + ".csv");
  write_results_csv(csv, all.rows, command + " " + model);
  write_summary(cfg.out / (command + "_" + model + "_summary.txt"), command + " " + model, all);
  return all;
}

void report(const std::string& heading, const SuiteResult& r) {
  std::cout << heading << "\n";
  for (const Check& c : r.checks) std::cout << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
}

}  // namespace

int run(const ExperimentConfig& cfg) {
  try {
    std::filesystem::create_directories(cfg.out);
  } catch (const std::exception& e) {
    std::cerr << "cannot create output directory " << cfg.out << ": " << e.what() << "\n";
    return 1;
  }
  try {
    bool ok = true;
    auto counterexample = [&]() {
      const Counterexample cx(cfg.theta);
      const SuiteResult r = counterexample_suite(cx, std::max(cfg.n_max, cx.n0() + 10), 100000.0, cfg.out / "counterexample");
      write_results_csv(cfg.out / "counterexample" / "constants.csv", r.rows, "counterexample constants");
      report("counterexample theta=" + format_short(cfg.theta), r);
      ok = ok && r.passed();
    };
    if (cfg.command == "counterexample") {
      counterexample();
    } else if (cfg.command == "all") {
      for (const std::string& model : fixture_names()) {
        for (const char* command : {"check-hypotheses", "simulate", "gradient", "moment-audit", "ratio-sweep"}) {
          const SuiteResult r = run_for_model(cfg, command, model);
          report(std::string(command) + " " + model, r);
          ok = ok && r.passed();
        }
      }
      counterexample();
    } else {
      const SuiteResult r = run_for_model(cfg, cfg.command, cfg.model);
      report(cfg.command + " " + cfg.model, r);
      ok = r.passed();
    }
    std::cout << (ok ? "all checks passed" : "some checks failed") << "; results in " << cfg.out.string() << "\n";
    return ok ? 0 : 2;
  } catch (const ExplosionError& e) {
    std::cerr << "property failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace belgrad::harness

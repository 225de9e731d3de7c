#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "belgrad/counterexample.hpp"
#include "belgrad/estimators.hpp"
#include "belgrad/fixtures.hpp"
#include "belgrad/harness/csv.hpp"

namespace belgrad::harness {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::vector<CsvRow> rows;
  std::vector<Check> checks;
  std::map<std::string, double> scalars;
  bool passed() const;
  void append(const SuiteResult& other);
};

/// H1-H3 on an audit grid for the model and for its regularized coefficients.
SuiteResult hypotheses_suite(const Fixture& fixture, const RegularizedModel& regularized, int n_radial = 200,
                             int n_random = 500);

/// Mean of e^{-beta} |eta|^2 at each time in ts (one simulation, snapshots),
/// checked against |h|^2 + 3 stderr.
SuiteResult supermartingale_suite(const RegularizedModel& model, const std::string& label, const Vec& x,
                                  const Vec& h, const std::vector<double>& ts, SimConfig cfg);

/// Final-time means of X, e^{-beta} and the explosion count, plus the
/// supermartingale check at t/4, t/2 and t. A non-empty dump path receives
/// the binary ensemble.
SuiteResult simulate_suite(const RegularizedModel& model, const std::string& label, const Vec& x, SimConfig cfg,
                           const std::filesystem::path& dump = {});

struct GradientOptions {
  SimConfig cfg;                   // BEL and finite-difference runs
  std::size_t duhamel_outer = 20000;
  DuhamelConfig duhamel;
  double fd_eps = 0.0;             // <= 0: default_fd_step
};

/// BEL for S_t against finite differences of S_t, and the Duhamel estimator
/// for P_t against finite differences of P_t, each within 3 combined stderr.
SuiteResult gradient_suite(const RegularizedModel& model, const std::string& label, const TestFunction& phi, double t,
                           const Vec& x, const Vec& h, const GradientOptions& options);

/// Duhamel estimate of d/dx E cos(lambda X(t)) on the ou fixture against the
/// Gaussian closed form: 5% relative, or |estimate| <= 3 stderr where the
/// exact derivative vanishes.
SuiteResult ou_closed_form_suite(const RegularizedModel& ou, double lambda, double t, const std::vector<double>& xs,
                                 SimConfig cfg, const DuhamelConfig& duhamel);

SuiteResult moment_suite(const RegularizedModel& model, const std::string& label, const std::vector<double>& ts,
                         const std::vector<Vec>& xs, SimConfig cfg);

/// Weighted ratio sweep. Records max_weighted and stability as scalars and
/// checks stability < 10.
SuiteResult ratio_sweep_suite(const RegularizedModel& model, const std::string& label,
                              const std::vector<TestFunction>& phis, const std::vector<double>& ts,
                              const std::vector<Vec>& xs, SimConfig cfg, double eps = 0.0);

/// sqrt(t) |fd gradient of P_t phi| at x = c_n for increasing n: each step up
/// must exceed 3 combined stderr, and the weighted ratio at the same points
/// must stay below weighted_bound.
SuiteResult failure_demo_suite(const RegularizedModel& model, const TestFunction& phi,
                               double t, const std::vector<int>& ns, double eps, SimConfig cfg,
                               double weighted_bound);

/// Deterministic counterexample verification. Writes growth.csv,
/// boundedness.csv, blocks.csv and summary.txt into out_dir when it is not
/// empty.
SuiteResult counterexample_suite(const Counterexample& cx, int n_max, double x_max,
                                 const std::filesystem::path& out_dir);

/// PASS/FAIL per check, with a timestamped header.
void write_summary(const std::filesystem::path& file, const std::string& title, const SuiteResult& result);

/// Parses "1,2;3,4" style point lists: points separated by ';', components by
/// ','. A single component in dimension d > 1 is placed on the first axis.
std::vector<Vec> parse_points(const std::string& text, int dim);

}  // namespace belgrad::harness

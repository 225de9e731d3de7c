#include "belgrad/harness/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "belgrad/fixtures.hpp"

namespace belgrad::harness {

namespace {

const std::vector<std::string> kKeys{"model", "theta", "n-max", "n", "phi", "t", "x",
                                     "dt",    "paths", "seed",  "out", "workers"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(v.substr(used)) != "") throw std::invalid_argument(key + ": '" + v + "' is not a number");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(v.substr(used)) != "") throw std::invalid_argument(key + ": '" + v + "' is not an integer");
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream s(v);
  std::string item;
  while (std::getline(s, item, ',')) out.push_back(trim(item));
  return out;
}

void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "model") {
    const auto& names = fixture_names();
    if (std::find(names.begin(), names.end(), v) == names.end())
      throw std::invalid_argument("model: unknown fixture '" + v + "'");
    cfg.model = v;
  } else if (key == "theta") {
    const double th = to_double(key, v);
    if (!(th > 0.0 && th < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
    cfg.theta = th;
  } else if (key == "n-max") {
    const long long n = to_integer(key, v);
    if (n < 1 || n > 100000) throw std::invalid_argument("n-max must lie in [1, 100000]");
    cfg.n_max = static_cast<int>(n);
  } else if (key == "n") {
    std::vector<int> levels;
    for (const std::string& item : split_list(v)) {
      const long long n = to_integer(key, item);
      if (n < 1 || n > 1000000) throw std::invalid_argument("n: regularization levels must lie in [1, 1e6]");
      levels.push_back(static_cast<int>(n));
    }
    if (levels.empty()) throw std::invalid_argument("n: empty list");
    cfg.levels = levels;
  } else if (key == "phi") {
    if (v.empty()) throw std::invalid_argument("phi: empty list");
    cfg.phi = v;
  } else if (key == "t") {
    std::vector<double> ts;
    for (const std::string& item : split_list(v)) {
      const double t = to_double(key, item);
      if (!(t > 0.0)) throw std::invalid_argument("t: times must be positive");
      ts.push_back(t);
    }
    if (ts.empty()) throw std::invalid_argument("t: empty list");
    cfg.ts = ts;
  } else if (key == "x") {
    if (v.empty()) throw std::invalid_argument("x: empty point list");
    cfg.x = v;
  } else if (key == "dt") {
    const double dt = to_double(key, v);
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    cfg.dt = dt;
  } else if (key == "paths") {
    const long long n = to_integer(key, v);
    if (n < 2) throw std::invalid_argument("paths must be at least 2");
    cfg.paths = static_cast<std::size_t>(n);
  } else if (key == "seed") {
    std::size_t used = 0;
    unsigned long long s = 0;
    try {
      if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
      s = std::stoull(v, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) throw std::invalid_argument("seed: '" + v + "' is not a 64-bit unsigned integer");
    cfg.seed = s;
  } else if (key == "out") {
    if (v.empty()) throw std::invalid_argument("out: empty path");
    cfg.out = v;
  } else if (key == "workers") {
    const long long w = to_integer(key, v);
    if (w < 0 || w > 4096) throw std::invalid_argument("workers must lie in [0, 4096]");
    cfg.workers = static_cast<int>(w);
  } else {
    throw std::invalid_argument("unknown key '" + key + "'");
  }
}

std::string usage_text(CLI::App& app) {
  return app.help() +
         "\nCommands: check-hypotheses, simulate, gradient, moment-audit, ratio-sweep, counterexample, all\n"
         "A flag given twice keeps its last value. Flags override --config file entries.\n";
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"check-hypotheses", "simulate",       "gradient", "moment-audit",
                                              "ratio-sweep",      "counterexample", "all"};
  return names;
}

void apply_config_text(const std::string& text, const std::string& source, ExperimentConfig& cfg) {
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw std::invalid_argument(where + "unknown key '" + key + "'");
    try {
      set_key(cfg, key, body.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
}

void apply_config_file(const std::filesystem::path& file, ExperimentConfig& cfg) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read config file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(buf.str(), file.string(), cfg);
}

int effective_workers(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("BEL_GRADIENTS_WORKERS")) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && w > 0 && w <= 4096) return static_cast<int>(w);
  }
  return 0;
}

ParseResult parse_config(int argc, const char* const* argv) {
  CLI::App app{"Weighted gradient estimates for diffusions: experiments and verifications", "belgrad"};
  std::string command;
  std::string config_file;
  std::map<std::string, std::string> given;
  app.add_option("command", command, "what to run")->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_file, "file of 'key = value' lines")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  const std::vector<std::pair<std::string, std::string>> flags{
      {"model", "fixture: bm, ou, sinsq, counterexample"},
      {"theta", "counterexample exponent in (0, 1)"},
      {"n-max", "last block index of the counterexample tables"},
      {"n", "regularization levels, comma separated"},
      {"phi", "test functions, comma separated: cos, sin, sinpi, tanh, const (name:param allowed)"},
      {"t", "times, comma separated"},
      {"x", "points: components by ',', points by ';'"},
      {"dt", "Euler-Maruyama step"},
      {"paths", "Monte Carlo paths"},
      {"seed", "master seed"},
      {"out", "output directory"},
      {"workers", "worker threads (0: BEL_GRADIENTS_WORKERS or all cores)"}};
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& [name, help] : flags) {
    options[name] = app.add_option("--" + name, values[name], help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  ParseResult result;
  if (argc <= 1) {
    result.exit_code = 1;
    result.message = usage_text(app);
    return result;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    result.exit_code = 0;
    result.message = usage_text(app);
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = 1;
    result.message = std::string(e.what()) + "\n\n" + usage_text(app);
    return result;
  }
  if (command.empty()) {
    result.exit_code = 1;
    result.message = "missing command\n\n" + usage_text(app);
    return result;
  }

  ExperimentConfig cfg;
  cfg.command = command;
  try {
    if (!config_file.empty()) apply_config_file(config_file, cfg);
    for (const auto& [name, help] : flags) {
      if (options[name]->count() > 0) set_key(cfg, name, values[name]);
    }
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.message = e.what();
    return result;
  }
  result.config = cfg;
  return result;
}

}  // namespace belgrad::harness

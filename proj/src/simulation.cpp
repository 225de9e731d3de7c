#include "belgrad/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <Eigen/LU>

#include "belgrad/parallel.hpp"

namespace belgrad {

void validate(const SimConfig& cfg) {
  if (!(cfg.t_final > 0.0)) throw std::invalid_argument("SimConfig: t_final must be positive");
  if (!(cfg.dt > 0.0) || cfg.dt > cfg.t_final) throw std::invalid_argument("SimConfig: need 0 < dt <= t_final");
  if (cfg.n_paths == 0) throw std::invalid_argument("SimConfig: n_paths must be positive");
  for (double s : cfg.snapshot_times)
    if (!(s > 0.0 && s <= cfg.t_final)) throw std::invalid_argument("SimConfig: snapshot times must lie in (0, t_final]");
}

std::vector<double> time_grid(double t_final, double dt, const std::vector<double>& extra) {
  const double snap = 1e-9 * dt;
  std::vector<double> grid{0.0};
  const auto n_full = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  for (std::size_t k = 1; k < n_full; ++k) grid.push_back(static_cast<double>(k) * dt);
  grid.push_back(t_final);
  for (double e : extra) {
    auto it = std::lower_bound(grid.begin(), grid.end(), e);
    if (it != grid.end() && std::abs(*it - e) <= snap) {
      *it = e;
    } else if (it != grid.begin() && std::abs(*(it - 1) - e) <= snap) {
      *(it - 1) = e;
    } else {
      grid.insert(it, e);
    }
  }
  grid.front() = 0.0;
  grid.back() = t_final;
  return grid;
}

PathIntegrator::PathIntegrator(const RegularizedModel& model, bool track_tangent)
    : model_(&model),
      dim_(model.coefficients.dim),
      track_tangent_(track_tangent),
      constant_sigma_(model.coefficients.constant_diffusion) {
  validate(model.coefficients);
  if (constant_sigma_) {
    sigma_const_ = model.coefficients.diffusion(Vec::Zero(dim_));
    Eigen::PartialPivLU<Mat> lu(sigma_const_);
    if (!(lu.rcond() >= 1e-12)) throw SingularDiffusionError("constant diffusion matrix is singular");
    sigma_inv_const_ = lu.inverse();
  }
}

AugmentedPath PathIntegrator::start(const Vec& x0, const Vec& h) const {
  if (x0.size() != dim_ || h.size() != dim_) throw std::invalid_argument("start point / direction dimension mismatch");
  AugmentedPath state;
  state.x = x0;
  state.eta = h;
  state.x_running_max = x0.norm();
  state.v_running_max = model_->potential.value(x0);
  return state;
}

AugmentedPath PathIntegrator::with_current_potential(AugmentedPath state) const {
  if (!state.exploded) state.v_running_max = std::max(state.v_running_max, model_->potential.value(state.x));
  return state;
}

Vec PathIntegrator::solve_sigma(const Mat& sigma, const Vec& rhs) const {
  if (dim_ == 1) {
    const double s = sigma(0, 0);
    if (!(std::abs(s) > 0.0) || !std::isfinite(s)) throw SingularDiffusionError("diffusion coefficient vanishes");
    Vec out(1);
    out(0) = rhs(0) / s;
    return out;
  }
  Eigen::PartialPivLU<Mat> lu(sigma);
  if (!(lu.rcond() >= 1e-12)) throw SingularDiffusionError("diffusion matrix numerically singular (rcond < 1e-12)");
  return lu.solve(rhs);
}

void PathIntegrator::step(AugmentedPath& state, double dt, NormalStream& normals) const {
  if (state.exploded) return;
  const SdeModel& m = model_->coefficients;
  const double sqdt = std::sqrt(dt);
  Vec dw(dim_);
  for (int i = 0; i < dim_; ++i) dw(i) = sqdt * normals.next();

  const Vec& x = state.x;
  const Vec b = m.drift(x);
  const Mat sigma = constant_sigma_ ? sigma_const_ : m.diffusion(x);
  const double v = model_->potential.value(x);

  if (track_tangent_) {
    const Vec& eta = state.eta;
    const Vec grad_v = model_->potential.gradient(x);
    const double gv_eta = grad_v.dot(eta);
    const Vec sigma_inv_eta = constant_sigma_ ? Vec(sigma_inv_const_ * eta) : solve_sigma(sigma, eta);
    state.bel += sigma_inv_eta.dot(dw);
    state.grad_v_eta += gv_eta * dt;
    state.s_grad_v_eta += state.time * gv_eta * dt;

    Vec eta_next = eta + m.drift_jacobian(x) * eta * dt;
    if (!constant_sigma_) {
      const DiffusionJacobians ds = m.diffusion_jacobians(x);
      for (int i = 0; i < dim_; ++i) eta_next += ds[i] * eta * dw(i);
    }
    state.eta = eta_next;
  }
  state.beta += v * dt;
  state.x = x + b * dt + sigma * dw;
  state.time += dt;

  const double r = state.x.norm();
  if (!std::isfinite(r) || r > kExplosionRadius || !std::isfinite(state.beta) ||
      (track_tangent_ && !std::isfinite(state.eta.squaredNorm()))) {
    state.exploded = true;
    return;
  }
  state.x_running_max = std::max(state.x_running_max, r);
  // left-endpoint values only; simulate_path folds in the current point when it records a state
  state.v_running_max = std::max(state.v_running_max, v);
}

std::size_t PathEnsemble::n_exploded() const {
  return static_cast<std::size_t>(std::count_if(paths.begin(), paths.end(), [](const AugmentedPath& p) { return p.exploded; }));
}

void PathEnsemble::require_no_explosions() const {
  const auto bad = n_exploded();
  if (bad > 0)
    throw ExplosionError(std::to_string(bad) + " of " + std::to_string(paths.size()) +
                         " paths exploded (|X| > 1e8 or non-finite state)");
}

AugmentedPath simulate_path(const PathIntegrator& integrator, const Vec& x0, const Vec& h,
                            const std::vector<double>& grid, const std::vector<std::size_t>& snapshot_index,
                            NormalStream normals, AugmentedPath* snapshots_out) {
  AugmentedPath state = integrator.start(x0, h);
  std::size_t next_snap = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    integrator.step(state, grid[k] - grid[k - 1], normals);
    state.time = grid[k];  // keep the clock on the grid, free of accumulated rounding
    while (next_snap < snapshot_index.size() && snapshot_index[next_snap] == k) {
      snapshots_out[next_snap] = integrator.with_current_potential(state);
      ++next_snap;
    }
  }
  return integrator.with_current_potential(state);
}

namespace {

struct Plan {
  std::vector<double> grid;
  std::vector<std::size_t> snapshot_index;  // grid index per requested snapshot, in request order
};

Plan make_plan(const SimConfig& cfg) {
  validate(cfg);
  Plan plan;
  plan.grid = time_grid(cfg.t_final, cfg.dt, cfg.snapshot_times);
  for (double s : cfg.snapshot_times) {
    auto it = std::lower_bound(plan.grid.begin(), plan.grid.end(), s - 1e-9 * cfg.dt);
    plan.snapshot_index.push_back(static_cast<std::size_t>(it - plan.grid.begin()));
  }
  return plan;
}

PathEnsemble run(const RegularizedModel& model, const Vec& x0, const Vec& h, const SimConfig& cfg, bool parallel) {
  const Plan plan = make_plan(cfg);
  const PathIntegrator integrator(model, cfg.track_tangent);
  const auto key = derive_key(cfg.master_seed, StreamTag::kPaths);
  const std::size_t n_snap = cfg.snapshot_times.size();

  // simulate_path wants snapshot indices sorted; remember where each goes.
  std::vector<std::size_t> perm(n_snap);
  for (std::size_t j = 0; j < n_snap; ++j) perm[j] = j;
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return plan.snapshot_index[a] < plan.snapshot_index[b]; });
  std::vector<std::size_t> sorted_index(n_snap);
  for (std::size_t j = 0; j < n_snap; ++j) sorted_index[j] = plan.snapshot_index[perm[j]];

  PathEnsemble out;
  out.dim = model.coefficients.dim;
  out.master_seed = cfg.master_seed;
  out.n_steps = plan.grid.size() - 1;
  out.t_final = cfg.t_final;
  out.dt = cfg.dt;
  out.x0 = x0;
  out.h = h;
  out.snapshot_times = cfg.snapshot_times;
  out.paths.resize(cfg.n_paths);
  out.snapshots.resize(cfg.n_paths * n_snap);

  for_each_index(cfg.n_paths, cfg.workers, parallel, [&](std::size_t k) {
    std::vector<AugmentedPath> snaps(n_snap);
    out.paths[k] = simulate_path(integrator, x0, h, plan.grid, sorted_index, NormalStream(key, k), snaps.data());
    for (std::size_t j = 0; j < n_snap; ++j) out.snapshots[k * n_snap + perm[j]] = snaps[j];
  });
  return out;
}

}  // namespace

PathEnsemble simulate_ensemble(const RegularizedModel& model, const Vec& x0, const Vec& h, const SimConfig& cfg) {
  return run(model, x0, h, cfg, true);
}

PathEnsemble simulate_ensemble_serial(const RegularizedModel& model, const Vec& x0, const Vec& h,
                                      const SimConfig& cfg) {
  return run(model, x0, h, cfg, false);
}

LocalizationResult localization_agreement(const SdeModel& model, int n, const Vec& x0, const SimConfig& cfg) {
  const RegularizedModel base = unregularized(model);
  const RegularizedModel reg = regularize_with(model, n, RegularizationConstants{});
  const Vec h = unit_vec(model.dim, 0);
  const PathEnsemble a = simulate_ensemble(base, x0, h, cfg);
  const PathEnsemble b = simulate_ensemble(reg, x0, h, cfg);

  LocalizationResult result;
  std::size_t exited = 0;
  for (std::size_t k = 0; k < a.n_paths(); ++k) {
    const AugmentedPath& pa = a.paths[k];
    const AugmentedPath& pb = b.paths[k];
    if (pa.exploded || pb.exploded || pb.x_running_max >= n) {
      ++exited;
      continue;
    }
    result.max_difference = std::max(result.max_difference, (pa.x - pb.x).norm());
    ++result.n_surviving;
  }
  result.exited_fraction = static_cast<double>(exited) / static_cast<double>(a.n_paths());
  return result;
}

namespace {

constexpr char kMagic[8] = {'B', 'E', 'L', 'E', 'N', 'S', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("ensemble file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_ensemble(const std::filesystem::path& file, const PathEnsemble& e) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
  os.write(kMagic, sizeof kMagic);
  put_u64(os, static_cast<std::uint64_t>(e.dim));
  put_u64(os, e.paths.size());
  put_u64(os, e.master_seed);
  put_u64(os, e.n_steps);
  put_f64(os, e.t_final);
  put_f64(os, e.dt);
  for (int i = 0; i < e.dim; ++i) put_f64(os, e.x0(i));
  for (int i = 0; i < e.dim; ++i) put_f64(os, e.h(i));
  for (const AugmentedPath& p : e.paths) {
    for (int i = 0; i < e.dim; ++i) put_f64(os, p.x(i));
    for (int i = 0; i < e.dim; ++i) put_f64(os, p.eta(i));
    for (double v : {p.beta, p.bel, p.grad_v_eta, p.s_grad_v_eta, p.v_running_max, p.x_running_max, p.time,
                     p.exploded ? 1.0 : 0.0})
      put_f64(os, v);
  }
  if (!os) throw std::runtime_error("write failed for " + file.string());
}

PathEnsemble read_ensemble(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + file.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error(file.string() + ": not an ensemble dump (bad magic)");
  PathEnsemble e;
  const auto dim = get_u64(is);
  if (dim < 1 || dim > static_cast<std::uint64_t>(kMaxDim)) throw std::runtime_error("ensemble dump: bad dimension");
  e.dim = static_cast<int>(dim);
  const auto n = get_u64(is);
  e.master_seed = get_u64(is);
  e.n_steps = get_u64(is);
  e.t_final = get_f64(is);
  e.dt = get_f64(is);
  e.x0.resize(e.dim);
  e.h.resize(e.dim);
  for (int i = 0; i < e.dim; ++i) e.x0(i) = get_f64(is);
  for (int i = 0; i < e.dim; ++i) e.h(i) = get_f64(is);
  e.paths.resize(n);
  for (AugmentedPath& p : e.paths) {
    p.x.resize(e.dim);
    p.eta.resize(e.dim);
    for (int i = 0; i < e.dim; ++i) p.x(i) = get_f64(is);
    for (int i = 0; i < e.dim; ++i) p.eta(i) = get_f64(is);
    p.beta = get_f64(is);
    p.bel = get_f64(is);
    p.grad_v_eta = get_f64(is);
    p.s_grad_v_eta = get_f64(is);
    p.v_running_max = get_f64(is);
    p.x_running_max = get_f64(is);
    p.time = get_f64(is);
    p.exploded = get_f64(is) != 0.0;
  }
  return e;
}

}  // namespace belgrad

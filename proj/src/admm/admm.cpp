#include "ptychotomo/admm/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ptychotomo/core/container.hpp"
#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/parallel.hpp"
#include "ptychotomo/core/vector_ops.hpp"
#include "ptychotomo/operators/linearization.hpp"
#include "ptychotomo/operators/radon.hpp"
#include "ptychotomo/solvers/cg.hpp"
#include "ptychotomo/solvers/ptycho_subproblem.hpp"
#include "ptychotomo/solvers/tomo_subproblem.hpp"

namespace ptychotomo {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::psi: return "psi";
    case Stage::x: return "x";
    case Stage::eta: return "eta";
    case Stage::lambda: return "lambda";
    case Stage::mu: return "mu";
  }
  return "?";
}

namespace {

Array4d normalize_counts(const DiffractionData& data) {
  data.validate();
  Array4d d = data.counts;
  const double inv = 1.0 / (data.scale * data.scale);
  for (double& v : d) v *= inv;
  return d;
}

void require_finite(const Array3c& a, Stage s, int k) {
  if (!all_finite(a.flat())) {
    throw SolverAbort(std::string("non-finite values after the ") + stage_name(s) + " stage of iteration " +
                      std::to_string(k));
  }
}

CgOptions cg_options(const ReconConfig& cfg, int iters, const char* stage) {
  CgOptions o;
  o.iters = iters;
  o.armijo_c1 = cfg.armijo_c1;
  o.step_shrink = cfg.step_shrink;
  o.initial_step = cfg.initial_step;
  o.max_halvings = cfg.max_halvings;
  o.stage = stage;
  return o;
}

}  // namespace

AdmmSolver::AdmmSolver(const DiffractionData& data, ExperimentGeometry geom, ReconConfig cfg, Denoiser& denoiser)
    : cfg_(std::move(cfg)),
      op_(std::move(geom)),
      plan_(op_.geometry().nz, op_.geometry().n, op_.geometry().angles),
      d_(normalize_counts(data)),
      schedule_(AlphaSchedule::parse(cfg_.alpha_schedule, cfg_.outer_iters)),
      denoiser_(denoiser) {
  cfg_.validate();
  const std::size_t n = op_.geometry().n;
  const double radius = static_cast<double>(n) / 2.0 - 1.0;
  if (cfg_.fov_support) support_ = disk_support(n, radius);
  if (cfg_.fov_support && cfg_.phase_reference) {
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (std::abs(static_cast<double>(u) - c) > radius) reference_cols_.push_back(u);
    }
  }
  const auto& g = op_.geometry();
  const std::array<std::size_t, 4> want{g.n_angles(), g.scans_per_angle(), g.detector_size, g.detector_size};
  if (d_.shape() != want) {
    throw DataError("diffraction data shape " + shape_string(d_.shape()) + " does not match geometry " +
                    shape_string(want));
  }
}

AdmmState AdmmSolver::init() const {
  const auto& g = op_.geometry();
  AdmmState s;
  s.psi = Array3c({g.n_angles(), g.nz, g.n}, Complex(1.0, 0.0));
  s.lambda = Array3c(s.psi.shape());
  s.x = Array3c({g.nz, g.n, g.n});
  s.eta = Array3c(s.x.shape());
  s.mu = Array3c(s.x.shape());
  s.hx = Array3c(s.psi.shape(), Complex(1.0, 0.0));
  return s;
}

void AdmmSolver::check_state(const AdmmState& s) const {
  const auto& g = op_.geometry();
  const std::array<std::size_t, 3> proj{g.n_angles(), g.nz, g.n};
  const std::array<std::size_t, 3> vol{g.nz, g.n, g.n};
  if (s.psi.shape() != proj || s.lambda.shape() != proj || s.hx.shape() != proj || s.x.shape() != vol ||
      s.eta.shape() != vol || s.mu.shape() != vol) {
    throw DataError("ADMM state does not match the geometry");
  }
}

namespace {

// The data term is blind to a global phase per angle; rays that miss the support see vacuum, so
// their transmission is exactly 1 and pins that phase.
void fix_phase(std::span<Complex> slab, std::size_t n, const std::vector<std::size_t>& cols) {
  Complex sum{};
  for (std::size_t r = 0; r < slab.size(); r += n) {
    for (std::size_t u : cols) sum += slab[r + u];
  }
  if (!(std::abs(sum) > 0.0)) return;
  const Complex rot = std::conj(sum) / std::abs(sum);
  for (auto& v : slab) v *= rot;
}

}  // namespace

void AdmmSolver::step(AdmmState& s, const StageObserver& observer) const {
  check_state(s);
  const auto t0 = std::chrono::steady_clock::now();
  const int k = s.k;
  const double rho = cfg_.rho, tau = cfg_.tau;
  const auto notify = [&](Stage st) {
    if (observer) observer(st, s);
  };

  // psi: independent per-angle solves
  const std::size_t na = s.psi.extent(0);
  std::vector<double> fp(na);
  std::vector<std::size_t> clamps(na);
  const CgOptions psi_opts = cg_options(cfg_, cfg_.inner_cg_iters, "psi");
  parallel_for(na, [&](std::size_t a) {
    PtychoAngleProblem p(op_, a, d_.slab(a), s.hx.slab(a), s.lambda.slab(a), rho);
    const CgState cg = cg_minimize(p, s.psi.slab(a), psi_opts);
    fp[a] = cg.objective.back();
    clamps[a] = p.clamped();
    if (!reference_cols_.empty()) fix_phase(s.psi.slab(a), s.psi.extent(2), reference_cols_);
  });
  double fp_total = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    fp_total += fp[a];
    s.log_clamps += clamps[a];
  }
  require_finite(s.psi, Stage::psi, k);
  notify(Stage::psi);

  // x: linearized tomography around psi_hat = psi - lambda / rho
  Array3c psi_hat(s.psi.shape());
  for (std::size_t i = 0; i < psi_hat.size(); ++i) psi_hat[i] = s.psi[i] - s.lambda[i] / rho;
  const Array3c zeta = zeta_term(psi_hat, &s.zeta_floored);
  TomoProblem tomo(plan_, zeta, psi_hat, s.eta, s.mu, rho, tau, op_.geometry().wavelength_voxels(), support_);
  const CgState tcg = cg_minimize(tomo, s.x.flat(), cg_options(cfg_, cfg_.tomo_cg_iters, "x"));
  if (cfg_.nonnegative) {
    for (auto& v : s.x.flat()) v = Complex(std::max(v.real(), 0.0), std::max(v.imag(), 0.0));
  }
  require_finite(s.x, Stage::x, k);
  notify(Stage::x);

  // eta: PnP on the real part of x_tilde = x + mu / tau; beta passes through
  const double alpha = schedule_.value(k);
  Array3c x_tilde(s.x.shape());
  for (std::size_t i = 0; i < x_tilde.size(); ++i) x_tilde[i] = s.x[i] + s.mu[i] / tau;
  if (alpha == 0.0) {
    s.eta = x_tilde;
  } else {
    Array3d delta(x_tilde.shape());
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = x_tilde[i].real();
    Array3d denoised;
    try {
      denoised = apply_pnp(delta, denoiser_, alpha);
    } catch (const DenoiserError& e) {
      std::cerr << "warning: iteration " << k << ": denoiser " << denoiser_.name() << " failed ("
                << reason_name(e.reason()) << ": " << e.what() << "); using identity\n";
      ++s.denoiser_fallbacks;
      denoised = delta;
    }
    for (std::size_t i = 0; i < denoised.size(); ++i) s.eta[i] = Complex(denoised[i], x_tilde[i].imag());
    if (!support_.empty()) {
      for (std::size_t i = 0; i < s.eta.size(); ++i) s.eta[i] *= support_[i % support_.size()];
    }
  }
  require_finite(s.eta, Stage::eta, k);
  notify(Stage::eta);

  // lambda += rho (H x - psi)
  Array3c hx_new = transmission(s.x, plan_, op_.geometry().wavenumber());
  double r1 = 0.0, dual = 0.0;
  for (std::size_t i = 0; i < hx_new.size(); ++i) {
    const Complex r = hx_new[i] - s.psi[i];
    r1 += std::norm(r);
    s.lambda[i] += rho * r;
    dual += std::norm(hx_new[i] - s.hx[i]);
  }
  require_finite(s.lambda, Stage::lambda, k);
  notify(Stage::lambda);

  // mu += tau (x - eta)
  double r2 = 0.0;
  for (std::size_t i = 0; i < s.mu.size(); ++i) {
    const Complex r = s.x[i] - s.eta[i];
    r2 += std::norm(r);
    s.mu[i] += tau * r;
  }
  require_finite(s.mu, Stage::mu, k);
  s.hx = std::move(hx_new);
  notify(Stage::mu);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.log.push_back({k, std::sqrt(r1), std::sqrt(r2), std::sqrt(dual), fp_total, tcg.objective.back(), alpha, secs});
  s.k = k + 1;
}

ResidualNorms residuals(const AdmmState& prev, const AdmmState& cur) {
  if (prev.hx.shape() != cur.hx.shape() || cur.hx.shape() != cur.psi.shape() || cur.x.shape() != cur.eta.shape()) {
    throw DataError("residuals: state shapes differ");
  }
  return {distance(cur.hx.flat(), cur.psi.flat()), distance(cur.x.flat(), cur.eta.flat()),
          distance(cur.hx.flat(), prev.hx.flat())};
}

RunResult run(const AdmmSolver& solver, AdmmState state, const RunOptions& opts) {
  const auto& cfg = solver.config();
  while (state.k < cfg.outer_iters) {
    solver.step(state, opts.observer);
    if (opts.on_row) opts.on_row(state.log.back());
    if (cfg.checkpoint_every > 0 && !opts.checkpoint_dir.empty() && state.k % cfg.checkpoint_every == 0) {
      save_checkpoint(opts.checkpoint_dir, state, recon_to_json(cfg));
    }
  }
  RunResult out{std::move(state), ObjectVolume{}};
  out.recon = ObjectVolume(out.state.eta, solver.geometry().voxel_size_nm);
  return out;
}

RunResult run(const DiffractionData& data, const ExperimentGeometry& geom, const ReconConfig& cfg, Denoiser& denoiser) {
  AdmmSolver solver(data, geom, cfg, denoiser);
  return run(solver, solver.init());
}

// Residual CSV -------------------------------------------------------------------------------

std::string residual_csv(const std::vector<ResidualRow>& log) {
  std::ostringstream os;
  os << kResidualCsvHeader << '\n' << std::setprecision(17);
  for (const auto& r : log) {
    os << r.k << ',' << r.r1 << ',' << r.r2 << ',' << r.s << ',' << r.fp << ',' << r.ft << ',' << r.alpha << ','
       << std::setprecision(6) << r.seconds << std::setprecision(17) << '\n';
  }
  return os.str();
}

void write_residual_csv(const std::filesystem::path& path, const std::vector<ResidualRow>& log) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << residual_csv(log);
}

std::vector<ResidualRow> read_residual_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path.string());
  std::string line;
  std::getline(f, line);
  if (line != kResidualCsvHeader) throw DataError(path.string() + ": unexpected header");
  std::vector<ResidualRow> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    ResidualRow r;
    if (!(is >> r.k >> r.r1 >> r.r2 >> r.s >> r.fp >> r.ft >> r.alpha >> r.seconds)) {
      throw DataError(path.string() + ": malformed row");
    }
    out.push_back(r);
  }
  return out;
}

// Checkpoints --------------------------------------------------------------------------------

void save_checkpoint(const std::filesystem::path& dir, const AdmmState& state, const nlohmann::json& meta) {
  std::filesystem::create_directories(dir);
  save_array(dir / "psi.ptvf", state.psi, Dtype::c128);
  save_array(dir / "lambda.ptvf", state.lambda, Dtype::c128);
  save_array(dir / "x.ptvf", state.x, Dtype::c128);
  save_array(dir / "eta.ptvf", state.eta, Dtype::c128);
  save_array(dir / "mu.ptvf", state.mu, Dtype::c128);
  save_array(dir / "hx.ptvf", state.hx, Dtype::c128);
  nlohmann::json j;
  j["k"] = state.k;
  j["log_clamps"] = state.log_clamps;
  j["zeta_floored"] = state.zeta_floored;
  j["denoiser_fallbacks"] = state.denoiser_fallbacks;
  j["config"] = meta;
  auto rows = nlohmann::json::array();
  for (const auto& r : state.log) rows.push_back({r.k, r.r1, r.r2, r.s, r.fp, r.ft, r.alpha, r.seconds});
  j["log"] = rows;
  std::ofstream f(dir / "state.json");
  if (!f) throw DataError("cannot write checkpoint in " + dir.string());
  f << j.dump(1) << '\n';
}

AdmmState load_checkpoint(const std::filesystem::path& dir, nlohmann::json* meta) {
  std::ifstream f(dir / "state.json");
  if (!f) throw DataError("no checkpoint in " + dir.string());
  nlohmann::json j;
  try {
    f >> j;
    AdmmState s;
    s.psi = load_complex<3>(dir / "psi.ptvf");
    s.lambda = load_complex<3>(dir / "lambda.ptvf");
    s.x = load_complex<3>(dir / "x.ptvf");
    s.eta = load_complex<3>(dir / "eta.ptvf");
    s.mu = load_complex<3>(dir / "mu.ptvf");
    s.hx = load_complex<3>(dir / "hx.ptvf");
    s.k = j.at("k").get<int>();
    s.log_clamps = j.value("log_clamps", std::size_t{0});
    s.zeta_floored = j.value("zeta_floored", std::size_t{0});
    s.denoiser_fallbacks = j.value("denoiser_fallbacks", std::size_t{0});
    for (const auto& r : j.at("log")) {
      s.log.push_back({r.at(0).get<int>(), r.at(1).get<double>(), r.at(2).get<double>(), r.at(3).get<double>(),
                       r.at(4).get<double>(), r.at(5).get<double>(), r.at(6).get<double>(), r.at(7).get<double>()});
    }
    if (meta) *meta = j.value("config", nlohmann::json{});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(dir.string() + "/state.json: " + e.what());
  }
}

// Diagnostics --------------------------------------------------------------------------------

bool non_monotonic(const std::vector<double>& series, int burn_in, double rise, int min_rebounds) {
  int rebounds = 0;
  for (std::size_t i = static_cast<std::size_t>(std::max(burn_in, 0)) + 1; i < series.size(); ++i) {
    if (series[i] > series[i - 1] * (1.0 + rise)) ++rebounds;
  }
  return rebounds >= min_rebounds;
}

bool diverged(const std::vector<ResidualRow>& log) {
  for (const auto& r : log) {
    if (!std::isfinite(r.r1) || !std::isfinite(r.r2) || !std::isfinite(r.s)) return true;
  }
  return !log.empty() && log.back().r1 > log.front().r1;
}

// Config documents ---------------------------------------------------------------------------

ReconConfig recon_from_json(const nlohmann::json& j, ReconConfig c) {
  try {
    auto opt = [&](const char* key, auto& out) {
      if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
    };
    opt("rho", c.rho);
    opt("tau", c.tau);
    opt("varphi", c.varphi);
    opt("outer_iters", c.outer_iters);
    opt("inner_cg_iters", c.inner_cg_iters);
    opt("tomo_cg_iters", c.tomo_cg_iters);
    opt("fov_support", c.fov_support);
    opt("phase_reference", c.phase_reference);
    opt("nonnegative", c.nonnegative);
    opt("alpha_schedule", c.alpha_schedule);
    opt("denoiser", c.denoiser);
    opt("rng_seed", c.rng_seed);
    opt("armijo_c1", c.armijo_c1);
    opt("step_shrink", c.step_shrink);
    opt("initial_step", c.initial_step);
    opt("max_halvings", c.max_halvings);
    opt("checkpoint_every", c.checkpoint_every);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("recon config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json recon_to_json(const ReconConfig& c) {
  return {{"rho", c.rho},
          {"tau", c.tau},
          {"varphi", c.varphi},
          {"outer_iters", c.outer_iters},
          {"inner_cg_iters", c.inner_cg_iters},
          {"tomo_cg_iters", c.tomo_cg_iters},
          {"fov_support", c.fov_support},
          {"phase_reference", c.phase_reference},
          {"nonnegative", c.nonnegative},
          {"alpha_schedule", c.alpha_schedule},
          {"denoiser", c.denoiser},
          {"rng_seed", c.rng_seed},
          {"armijo_c1", c.armijo_c1},
          {"step_shrink", c.step_shrink},
          {"initial_step", c.initial_step},
          {"max_halvings", c.max_halvings},
          {"checkpoint_every", c.checkpoint_every}};
}

}  // namespace ptychotomo

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptychotomo/core/types.hpp"
#include "ptychotomo/denoise/denoiser.hpp"
#include "ptychotomo/denoise/schedule.hpp"
#include "ptychotomo/operators/ptycho.hpp"
#include "ptychotomo/operators/radon.hpp"

namespace ptychotomo {

struct ResidualRow {
  int k = 0;
  double r1 = 0.0;  ///< ||H x - psi||
  double r2 = 0.0;  ///< ||x - eta||
  double s = 0.0;   ///< ||H x^{k+1} - H x^k||
  double fp = 0.0;  ///< psi-subproblem objective after its CG solve, summed over angles
  double ft = 0.0;  ///< x-subproblem objective after its CG solve
  double alpha = 0.0;
  double seconds = 0.0;
};

struct AdmmState {
  Array3c psi;     ///< (Ntheta, Nz, N)
  Array3c lambda;  ///< (Ntheta, Nz, N)
  Array3c x;       ///< (Nz, N, N)
  Array3c eta;
  Array3c mu;
  Array3c hx;  ///< H x for the current x
  int k = 0;   ///< completed outer iterations
  std::vector<ResidualRow> log;
  std::size_t log_clamps = 0;          ///< clamped log|G psi| evaluations
  std::size_t zeta_floored = 0;        ///< psi_hat entries below the zeta floor
  std::size_t denoiser_fallbacks = 0;  ///< iterations that fell back to identity
};

enum class Stage { psi, x, eta, lambda, mu };
const char* stage_name(Stage s);

/// Called after each stage of an outer iteration with the partially updated state.
using StageObserver = std::function<void(Stage, const AdmmState&)>;

/// Joint ptycho-tomography ADMM with a plug-and-play eta-step.
///
/// The psi-subproblem is solved on counts / scale^2, i.e. with the unit-amplitude probe the
/// geometry carries; this scales the likelihood by 1/scale^2 and keeps rho, tau meaningful
/// independently of the photon budget.
class AdmmSolver {
 public:
  AdmmSolver(const DiffractionData& data, ExperimentGeometry geom, ReconConfig cfg, Denoiser& denoiser);

  const ExperimentGeometry& geometry() const noexcept { return op_.geometry(); }
  const ReconConfig& config() const noexcept { return cfg_; }
  const RadonPlan& plan() const noexcept { return plan_; }
  const PtychoOperator& ptycho() const noexcept { return op_; }
  const Array4d& normalized_data() const noexcept { return d_; }
  const AlphaSchedule& schedule() const noexcept { return schedule_; }

  /// x = eta = mu = 0, lambda = 0, psi = 1.
  AdmmState init() const;

  /// One outer iteration: psi, x, eta, lambda, mu, then a residual row. Throws SolverAbort
  /// naming the stage that produced non-finite values.
  void step(AdmmState& state, const StageObserver& observer = {}) const;

 private:
  void check_state(const AdmmState& s) const;

  ReconConfig cfg_;
  PtychoOperator op_;
  RadonPlan plan_;
  Array4d d_;
  AlphaSchedule schedule_;
  std::vector<double> support_;  ///< empty when fov_support is off
  std::vector<std::size_t> reference_cols_;
  Denoiser& denoiser_;
};

/// (r1, r2, s) norms for the transition prev -> cur.
struct ResidualNorms {
  double r1 = 0.0, r2 = 0.0, s = 0.0;
};
ResidualNorms residuals(const AdmmState& prev, const AdmmState& cur);

struct RunOptions {
  std::filesystem::path checkpoint_dir;  ///< used when cfg.checkpoint_every > 0
  std::function<void(const ResidualRow&)> on_row;
  StageObserver observer;
};

struct RunResult {
  AdmmState state;
  /// The reported reconstruction: eta, the last denoised consensus variable. With alpha == 0
  /// in the final iteration it equals x.
  ObjectVolume recon;
};

/// Runs outer iterations until state.k == cfg.outer_iters.
RunResult run(const AdmmSolver& solver, AdmmState state, const RunOptions& opts = {});
RunResult run(const DiffractionData& data, const ExperimentGeometry& geom, const ReconConfig& cfg, Denoiser& denoiser);

// Residual log and checkpoints ---------------------------------------------------------------

inline constexpr const char* kResidualCsvHeader = "k,r1,r2,s,Fp,Ft,alpha,seconds";
std::string residual_csv(const std::vector<ResidualRow>& log);
void write_residual_csv(const std::filesystem::path& path, const std::vector<ResidualRow>& log);
std::vector<ResidualRow> read_residual_csv(const std::filesystem::path& path);

/// Writes every array as a c128 container plus state.json; restoring is bit-exact.
void save_checkpoint(const std::filesystem::path& dir, const AdmmState& state, const nlohmann::json& meta = {});
AdmmState load_checkpoint(const std::filesystem::path& dir, nlohmann::json* meta = nullptr);

// Residual diagnostics -----------------------------------------------------------------------

/// True when, after `burn_in` rows, the series rises by more than `rise` (relative) at least
/// `min_rebounds` times.
bool non_monotonic(const std::vector<double>& series, int burn_in = 5, double rise = 0.01, int min_rebounds = 3);
/// Final r1 above the first r1, or any non-finite entry.
bool diverged(const std::vector<ResidualRow>& log);

// Config documents ---------------------------------------------------------------------------

/// Reads a ReconConfig; missing keys keep their defaults. Throws ConfigError.
ReconConfig recon_from_json(const nlohmann::json& j, ReconConfig base = {});
nlohmann::json recon_to_json(const ReconConfig& cfg);

}  // namespace ptychotomo

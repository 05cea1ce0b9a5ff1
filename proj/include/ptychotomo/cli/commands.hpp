#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ptychotomo/core/types.hpp"

namespace ptychotomo {

struct SimulateOptions {
  std::filesystem::path scenario;  ///< scenario JSON; empty means defaults
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;  ///< overrides rng_seed
};

struct ReconstructOptions {
  std::filesystem::path dataset;
  std::filesystem::path config;  ///< ReconConfig JSON; empty means defaults
  std::filesystem::path out_dir;
  /// Flags applied over the JSON config.
  std::optional<std::string> denoiser, alpha_schedule;
  std::optional<int> outer_iters, inner_cg_iters, tomo_cg_iters, checkpoint_every;
  std::optional<double> rho, tau;
  std::filesystem::path resume;  ///< checkpoint directory to continue from
};

struct EvaluateOptions {
  std::filesystem::path recon;  ///< reconstruction container
  std::filesystem::path truth;  ///< dataset directory or phantom container
  std::filesystem::path out_dir;  ///< optional: metrics.json and preview
};

struct CompareOptions {
  std::filesystem::path dataset;
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<std::string> denoiser;
  std::optional<int> outer_iters;
  std::vector<std::string> schedules;  ///< empty means the six study schedules
};

struct ServeOptions {
  std::string endpoint;  ///< unix:, tcp: or "stdio"
  std::string mode = "echo";
  std::size_t max_connections = 0;
};

ReconConfig resolve_recon_config(const std::filesystem::path& config, const ReconstructOptions& flags);

int cmd_simulate(const SimulateOptions& o);
int cmd_reconstruct(const ReconstructOptions& o);
int cmd_evaluate(const EvaluateOptions& o);
int cmd_compare_schedules(const CompareOptions& o);
int cmd_denoise_server(const ServeOptions& o);

}  // namespace ptychotomo

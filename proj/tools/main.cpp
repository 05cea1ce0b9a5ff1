#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "ptychotomo/cli/commands.hpp"
#include "ptychotomo/cli/report.hpp"
#include "ptychotomo/core/error.hpp"

using namespace ptychotomo;

namespace {

template <typename T>
void optional_flag(CLI::App* app, const std::string& name, std::optional<T>& out, const std::string& help) {
  app->add_option_function<T>(name, [&out](const T& v) { out = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint ptycho-tomography reconstruction with plug-and-play denoising"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a phantom and its far-field diffraction data");
  simulate->add_option("--scenario", sim.scenario, "scenario JSON (defaults when omitted)")->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out_dir, "dataset directory")->required();
  optional_flag(simulate, "--seed", sim.seed, "override rng_seed");

  ReconstructOptions rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Run the ADMM reconstruction on a dataset");
  reconstruct->add_option("--data", rec.dataset, "dataset directory")->required();
  reconstruct->add_option("--config", rec.config, "reconstruction JSON; flags override it")->check(CLI::ExistingFile);
  reconstruct->add_option("--out", rec.out_dir, "output directory")->required();
  optional_flag(reconstruct, "--denoiser", rec.denoiser, "identity | gaussian[:s] | median[:w] | tv[:w[:it]] | external:<endpoint>");
  optional_flag(reconstruct, "--alpha-schedule", rec.alpha_schedule, "e.g. constant:0, incremental_final:0.1");
  optional_flag(reconstruct, "--outer-iters", rec.outer_iters, "outer ADMM iterations");
  optional_flag(reconstruct, "--inner-cg-iters", rec.inner_cg_iters, "CG iterations per psi solve");
  optional_flag(reconstruct, "--tomo-cg-iters", rec.tomo_cg_iters, "CG iterations per x solve");
  optional_flag(reconstruct, "--checkpoint-every", rec.checkpoint_every, "checkpoint period, 0 disables");
  optional_flag(reconstruct, "--rho", rec.rho, "penalty rho");
  optional_flag(reconstruct, "--tau", rec.tau, "penalty tau");
  reconstruct->add_option("--resume", rec.resume, "checkpoint directory to continue from")->check(CLI::ExistingDirectory);

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "PSNR of a reconstruction against the phantom");
  evaluate->add_option("--recon", ev.recon, "reconstruction container")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", ev.truth, "dataset directory or phantom container")->required()->check(CLI::ExistingPath);
  evaluate->add_option("--out", ev.out_dir, "write metrics.json and a preview here");

  CompareOptions cmp;
  auto* compare = app.add_subcommand("compare-schedules", "Run the alpha-schedule study on one dataset");
  compare->add_option("--data", cmp.dataset, "dataset directory")->required();
  compare->add_option("--config", cmp.config, "base reconstruction JSON")->check(CLI::ExistingFile);
  compare->add_option("--out", cmp.out_dir, "output directory")->required();
  optional_flag(compare, "--denoiser", cmp.denoiser, "denoiser shared by all schedules");
  optional_flag(compare, "--outer-iters", cmp.outer_iters, "outer ADMM iterations");
  compare->add_option("--schedules", cmp.schedules, "schedules to compare (default: the six study schedules)");

  ServeOptions srv;
  auto* serve = app.add_subcommand("denoise-server", "Reference denoiser server for the wire protocol");
  serve->add_option("--endpoint", srv.endpoint, "unix:<path>, tcp:<host>:<port> or stdio")->required();
  serve->add_option("--mode", srv.mode, "echo | offset:<v>");
  serve->add_option("--max-connections", srv.max_connections, "stop after this many connections (0: never)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorKind::Config);
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*reconstruct) return cmd_reconstruct(rec);
    if (*evaluate) return cmd_evaluate(ev);
    if (*compare) return cmd_compare_schedules(cmp);
    if (*serve) return cmd_denoise_server(srv);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ErrorKind::Data);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

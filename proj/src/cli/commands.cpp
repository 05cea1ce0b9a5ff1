#include "ptychotomo/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include "ptychotomo/admm/admm.hpp"
#include "ptychotomo/cli/dataset.hpp"
#include "ptychotomo/cli/metrics.hpp"
#include "ptychotomo/cli/report.hpp"
#include "ptychotomo/core/container.hpp"
#include "ptychotomo/core/error.hpp"
#include "ptychotomo/denoise/denoiser.hpp"
#include "ptychotomo/simulate/simulate.hpp"

namespace fs = std::filesystem;

namespace ptychotomo {

namespace {

Array3d real_part(const Array3c& a) {
  Array3d out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
  return out;
}

// Preview window [0, max delta_truth] when the truth is known, otherwise the volume's own range.
std::pair<double, double> preview_window(const Array3d& delta, const std::optional<ObjectVolume>& truth) {
  double lo = 0.0, hi = 0.0;
  if (truth) {
    for (const auto& v : truth->data) hi = std::max(hi, v.real());
    return {0.0, hi};
  }
  if (delta.size() == 0) return {0.0, 1.0};
  lo = hi = delta[0];
  for (double v : delta) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::string safe_name(std::string s) {
  for (char& c : s) {
    if (c == ':' || c == '/' || c == ' ') c = '_';
  }
  return s;
}

nlohmann::json row_json(const ResidualRow& r) {
  return {{"k", r.k}, {"r1", r.r1}, {"r2", r.r2}, {"s", r.s}, {"Fp", r.fp}, {"Ft", r.ft}, {"alpha", r.alpha}};
}

}  // namespace

// simulate -----------------------------------------------------------------------------------

int cmd_simulate(const SimulateOptions& o) {
  const auto started = utc_now();
  ScenarioConfig sc = o.scenario.empty() ? ScenarioConfig{} : scenario_from_json(read_json_file(o.scenario));
  if (o.seed) sc.rng_seed = *o.seed;
  sc.validate();

  Dataset ds;
  ds.scenario = sc;
  ds.truth = make_phantom(sc);
  ds.geometry = make_geometry(sc);
  ds.data = simulate_data(*ds.truth, ds.geometry, sc.target_max_counts, sc.rng_seed, sc.poisson);
  write_dataset(o.out_dir, ds);

  const auto split = split_complex(*ds.truth);
  const auto [lo, hi] = preview_window(split.delta, ds.truth);
  write_preview_png(o.out_dir / "phantom_delta.png", split.delta, lo, hi);

  const double phase = max_phase(*ds.truth, ds.geometry);
  const auto scenario_json = scenario_to_json(sc);
  write_manifest(o.out_dir, "simulate", {{"scenario", o.scenario.string()}}, scenario_json,
                 {{"phantom", "phantom.ptvf"},
                  {"counts", "counts.ptvf"},
                  {"probe", "probe.ptvf"},
                  {"geometry", "geometry.json"},
                  {"scenario", "scenario.json"},
                  {"preview", "phantom_delta.png"},
                  {"count_scale", ds.data.scale},
                  {"max_phase_rad", phase}},
                 started);
  const auto& c = ds.data.counts.shape();
  std::printf("simulated %s phantom %zux%zux%zu: %zu angles x %zu positions x %zux%zu detector, max phase %.3f rad\n",
              sc.phantom == PhantomKind::chip ? "chip" : "circles", sc.nz, sc.n, sc.n, c[0], c[1], c[2], c[3], phase);
  std::printf("wrote %s\n", o.out_dir.c_str());
  return 0;
}

// reconstruct --------------------------------------------------------------------------------

ReconConfig resolve_recon_config(const fs::path& config, const ReconstructOptions& f) {
  ReconConfig c = config.empty() ? ReconConfig{} : recon_from_json(read_json_file(config));
  if (f.denoiser) c.denoiser = *f.denoiser;
  if (f.alpha_schedule) c.alpha_schedule = *f.alpha_schedule;
  if (f.outer_iters) c.outer_iters = *f.outer_iters;
  if (f.inner_cg_iters) c.inner_cg_iters = *f.inner_cg_iters;
  if (f.tomo_cg_iters) c.tomo_cg_iters = *f.tomo_cg_iters;
  if (f.checkpoint_every) c.checkpoint_every = *f.checkpoint_every;
  if (f.rho) c.rho = *f.rho;
  if (f.tau) c.tau = *f.tau;
  c.validate();
  return c;
}

int cmd_reconstruct(const ReconstructOptions& o) {
  const auto started = utc_now();
  const ReconConfig cfg = resolve_recon_config(o.config, o);
  const Dataset ds = read_dataset(o.dataset);
  // an unreachable external denoiser fails here, before any iteration
  auto denoiser = make_denoiser(cfg.denoiser);
  AdmmSolver solver(ds.data, ds.geometry, cfg, *denoiser);

  AdmmState state = o.resume.empty() ? solver.init() : load_checkpoint(o.resume);
  if (state.k > cfg.outer_iters) {
    throw ConfigError("checkpoint is at iteration " + std::to_string(state.k) + ", past outer_iters");
  }
  fs::create_directories(o.out_dir);
  RunOptions ro;
  if (cfg.checkpoint_every > 0) ro.checkpoint_dir = o.out_dir / "checkpoint";
  const int total = cfg.outer_iters;
  ro.on_row = [&](const ResidualRow& r) {
    if (r.k % 10 == 0 || r.k + 1 == total) {
      std::fprintf(stderr, "k=%d r1=%.4e r2=%.4e s=%.4e alpha=%.3f (%.2fs)\n", r.k, r.r1, r.r2, r.s, r.alpha,
                   r.seconds);
    }
  };
  const RunResult result = run(solver, std::move(state), ro);

  save_array(o.out_dir / "recon.ptvf", result.recon.data, Dtype::c64);
  save_array(o.out_dir / "x.ptvf", result.state.x, Dtype::c64);
  write_residual_csv(o.out_dir / "residuals.csv", result.state.log);
  const auto delta = real_part(result.recon.data);
  const auto [lo, hi] = preview_window(delta, ds.truth);
  write_preview_png(o.out_dir / "recon_delta.png", delta, lo, hi);

  nlohmann::json outputs = {{"recon", "recon.ptvf"},
                            {"x", "x.ptvf"},
                            {"residuals", "residuals.csv"},
                            {"preview", "recon_delta.png"},
                            {"iterations", result.state.k},
                            {"log_clamps", result.state.log_clamps},
                            {"zeta_floored", result.state.zeta_floored},
                            {"denoiser_fallbacks", result.state.denoiser_fallbacks}};
  if (!result.state.log.empty()) outputs["final_residuals"] = row_json(result.state.log.back());
  if (ds.truth) {
    const double p = psnr(result.recon, *ds.truth);
    outputs["psnr_db"] = format_db(p, 4);
    std::printf("PSNR(delta) = %s dB\n", format_db(p).c_str());
  }
  if (cfg.checkpoint_every > 0) outputs["checkpoint"] = "checkpoint";
  nlohmann::json cfg_json = recon_to_json(cfg);
  cfg_json["implied_noise_variance"] = cfg.implied_noise_variance();
  write_manifest(o.out_dir, "reconstruct",
                 {{"dataset", o.dataset.string()}, {"config", o.config.string()}, {"resume", o.resume.string()}},
                 cfg_json, outputs, started);
  std::printf("wrote %s\n", o.out_dir.c_str());
  return 0;
}

// evaluate -----------------------------------------------------------------------------------

int cmd_evaluate(const EvaluateOptions& o) {
  const auto started = utc_now();
  const ObjectVolume recon(load_complex<3>(o.recon));
  const fs::path truth_file = fs::is_directory(o.truth) ? o.truth / "phantom.ptvf" : o.truth;
  const ObjectVolume truth(load_complex<3>(truth_file));
  const double p = psnr(recon, truth);
  std::printf("PSNR(delta) = %s dB\n", format_db(p).c_str());
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    const auto delta = real_part(recon.data);
    const auto [lo, hi] = preview_window(delta, truth);
    write_preview_png(o.out_dir / "recon_delta.png", delta, lo, hi);
    write_json_file(o.out_dir / "metrics.json", {{"psnr_db", format_db(p, 4)}});
    write_manifest(o.out_dir, "evaluate", {{"recon", o.recon.string()}, {"truth", truth_file.string()}},
                   nlohmann::json::object(), {{"metrics", "metrics.json"}, {"preview", "recon_delta.png"}}, started);
  }
  return 0;
}

// compare-schedules --------------------------------------------------------------------------

int cmd_compare_schedules(const CompareOptions& o) {
  const auto started = utc_now();
  ReconstructOptions flags;
  flags.denoiser = o.denoiser;
  flags.outer_iters = o.outer_iters;
  ReconConfig base = resolve_recon_config(o.config, flags);
  base.checkpoint_every = 0;
  const Dataset ds = read_dataset(o.dataset);
  if (!ds.truth) throw DataError("compare-schedules needs phantom.ptvf in the dataset for PSNR");
  auto denoiser = make_denoiser(base.denoiser);

  std::vector<std::string> schedules = o.schedules.empty() ? study_schedules() : o.schedules;
  // the ML row comes first and serves as the reference
  schedules.insert(schedules.begin(), "constant:0");
  fs::create_directories(o.out_dir);

  struct Row {
    std::string schedule;
    double psnr;
    ResidualRow last;
    bool oscillating, diverged;
  };
  std::vector<Row> rows;
  for (const auto& sched : schedules) {
    ReconConfig cfg = base;
    cfg.alpha_schedule = sched;
    std::fprintf(stderr, "schedule %s (%d iterations, denoiser %s)\n", sched.c_str(), cfg.outer_iters,
                 cfg.denoiser.c_str());
    const RunResult r = run(ds.data, ds.geometry, cfg, *denoiser);
    const auto name = safe_name(sched);
    write_residual_csv(o.out_dir / ("residuals_" + name + ".csv"), r.state.log);
    save_array(o.out_dir / ("recon_" + name + ".ptvf"), r.recon.data, Dtype::c64);
    std::vector<double> r2;
    for (const auto& row : r.state.log) r2.push_back(row.r2);
    rows.push_back({sched, psnr(r.recon, *ds.truth), r.state.log.empty() ? ResidualRow{} : r.state.log.back(),
                    non_monotonic(r2), diverged(r.state.log)});
  }

  const double ml = rows.front().psnr;
  std::string table = "schedule,psnr_db,r1,r2,s,non_monotonic_r2,diverged,below_ml\n";
  std::printf("%-22s %9s %11s %11s %11s  %s\n", "schedule", "PSNR(dB)", "r1", "r2", "s", "flags");
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& r : rows) {
    const bool below_ml = r.schedule != "constant:0" && r.psnr <= ml;
    char line[512];
    std::snprintf(line, sizeof(line), "%s,%s,%.10g,%.10g,%.10g,%d,%d,%d\n", r.schedule.c_str(),
                  format_db(r.psnr, 4).c_str(), r.last.r1, r.last.r2, r.last.s, r.oscillating, r.diverged, below_ml);
    table += line;
    std::string flags_text;
    if (r.oscillating) flags_text += " non-monotonic";
    if (r.diverged) flags_text += " diverged";
    if (below_ml) flags_text += " below-ML";
    std::printf("%-22s %9s %11.4e %11.4e %11.4e %s\n", r.schedule.c_str(), format_db(r.psnr).c_str(), r.last.r1,
                r.last.r2, r.last.s, flags_text.c_str());
    summary.push_back({{"schedule", r.schedule},
                       {"psnr_db", format_db(r.psnr, 4)},
                       {"final", row_json(r.last)},
                       {"non_monotonic_r2", r.oscillating},
                       {"diverged", r.diverged},
                       {"below_ml", below_ml}});
  }
  {
    std::FILE* f = std::fopen((o.out_dir / "summary.csv").c_str(), "wb");
    if (!f) throw DataError("cannot write summary.csv");
    std::fputs(table.c_str(), f);
    std::fclose(f);
  }
  write_json_file(o.out_dir / "summary.json", summary);
  write_manifest(o.out_dir, "compare-schedules", {{"dataset", o.dataset.string()}, {"config", o.config.string()}},
                 recon_to_json(base), {{"summary", "summary.csv"}, {"schedules", schedules}}, started);
  return 0;
}

// denoise-server -----------------------------------------------------------------------------

int cmd_denoise_server(const ServeOptions& o) {
  const auto transform = make_wire_transform(o.mode);
  if (o.endpoint == "stdio") {
    Channel ch(0, 1, -1, false);
    serve_stream(ch, transform);
    return 0;
  }
  std::fprintf(stderr, "serving %s on %s\n", o.mode.c_str(), o.endpoint.c_str());
  listen_and_serve(o.endpoint, transform, o.max_connections);
  return 0;
}

}  // namespace ptychotomo

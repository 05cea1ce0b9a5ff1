#include "ptychotomo/simulate/scenario.hpp"

#include <cmath>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/simulate/simulate.hpp"

namespace ptychotomo {

std::vector<Material> default_materials(PhantomKind kind) {
  if (kind == PhantomKind::chip) return {{"wire", 0.10, 0.004}, {"via", 0.12, 0.006}};
  return {{"Au", 0.10, 0.008}, {"Hg", 0.07, 0.005}};
}

std::vector<Material> ScenarioConfig::resolved_materials() const {
  return materials.empty() ? default_materials(phantom) : materials;
}

void ScenarioConfig::validate() const {
  if (nz < 1 || n < 2) throw ConfigError("scenario: object must be at least 1 x 2 x 2");
  if (probe.size < 1 || probe.size > nz || probe.size > n) throw ConfigError("scenario: probe does not fit the object");
  if (detector_size < probe.size || detector_size % 2 != 0) {
    throw ConfigError("scenario: detector size must be even and >= probe size");
  }
  if (!(overlap > 0.0 && overlap < 1.0)) throw ConfigError("scenario: overlap must be in (0, 1)");
  const std::size_t step = scan_step(probe.size, overlap);
  if (step < 1) throw ConfigError("scenario: scan step below one pixel");
  if (step >= probe.size) throw ConfigError("scenario: scan step >= probe size leaves no overlap");
  if (n_angles < 1) throw ConfigError("scenario: n_angles must be >= 1");
  if (!(target_max_counts > 0.0)) throw ConfigError("scenario: target_max_counts must be > 0");
  if (!(voxel_size_nm > 0.0) || !(wavelength_nm > 0.0)) throw ConfigError("scenario: lengths must be positive");
  if (!(probe.plateau_fraction >= 0.0 && probe.plateau_fraction <= 1.0)) {
    throw ConfigError("scenario: plateau_fraction must be in [0, 1]");
  }
  for (const auto& m : materials) {
    if (!std::isfinite(m.delta) || !std::isfinite(m.beta) || m.beta < 0.0) {
      throw ConfigError("scenario: material '" + m.name + "' needs finite delta and beta >= 0");
    }
  }
  if (layer_height < 1 || band_height < 1) throw ConfigError("scenario: layer/band height must be >= 1");
  if (wire_width < 1 || wire_pitch <= wire_width) throw ConfigError("scenario: wire pitch must exceed wire width");
  if (!(min_radius > 0.0 && max_radius >= min_radius)) throw ConfigError("scenario: invalid disk radius range");
}

namespace {
template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  try {
    if (j.contains("phantom")) {
      const auto kind = j.at("phantom").get<std::string>();
      if (kind == "chip") cfg.phantom = PhantomKind::chip;
      else if (kind == "circles") cfg.phantom = PhantomKind::circles;
      else throw ConfigError("scenario: unknown phantom '" + kind + "'");
    }
    if (j.contains("shape")) {
      const auto shape = j.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 3 || shape[1] != shape[2]) throw ConfigError("scenario: shape must be [Nz, N, N]");
      cfg.nz = shape[0];
      cfg.n = shape[1];
    }
    if (j.contains("materials")) {
      for (const auto& m : j.at("materials")) {
        cfg.materials.push_back({m.value("name", std::string("material")), m.at("delta").get<double>(),
                                 m.value("beta", 0.0)});
      }
    }
    if (j.contains("probe")) {
      const auto& p = j.at("probe");
      if (p.value("kind", std::string("flat_top_gaussian")) != "flat_top_gaussian") {
        throw ConfigError("scenario: only the flat_top_gaussian probe is supported");
      }
      read_opt(p, "size", cfg.probe.size);
      read_opt(p, "plateau_fraction", cfg.probe.plateau_fraction);
      read_opt(p, "edge_sigma", cfg.probe.edge_sigma);
    }
    read_opt(j, "detector_size", cfg.detector_size);
    read_opt(j, "overlap", cfg.overlap);
    if (j.contains("n_angles")) {
      const auto& a = j.at("n_angles");
      if (a.is_string()) {
        const auto s = a.get<std::string>();
        if (s == "well_sampled") cfg.n_angles = well_sampled_angles(cfg.n);
        else if (s == "under_sampled") cfg.n_angles = under_sampled_angles(cfg.n);
        else throw ConfigError("scenario: n_angles must be an integer, well_sampled or under_sampled");
      } else {
        cfg.n_angles = a.get<std::size_t>();
      }
    }
    read_opt(j, "target_max_counts", cfg.target_max_counts);
    read_opt(j, "poisson", cfg.poisson);
    read_opt(j, "rng_seed", cfg.rng_seed);
    read_opt(j, "voxel_size_nm", cfg.voxel_size_nm);
    read_opt(j, "wavelength_nm", cfg.wavelength_nm);
    read_opt(j, "jitter", cfg.jitter);
    read_opt(j, "layer_height", cfg.layer_height);
    read_opt(j, "wire_width", cfg.wire_width);
    read_opt(j, "wire_pitch", cfg.wire_pitch);
    read_opt(j, "band_height", cfg.band_height);
    read_opt(j, "disks_per_band", cfg.disks_per_band);
    read_opt(j, "min_radius", cfg.min_radius);
    read_opt(j, "max_radius", cfg.max_radius);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["phantom"] = cfg.phantom == PhantomKind::chip ? "chip" : "circles";
  j["shape"] = {cfg.nz, cfg.n, cfg.n};
  j["materials"] = nlohmann::json::array();
  for (const auto& m : cfg.resolved_materials()) j["materials"].push_back({{"name", m.name}, {"delta", m.delta}, {"beta", m.beta}});
  j["probe"] = {{"kind", "flat_top_gaussian"},
                {"size", cfg.probe.size},
                {"plateau_fraction", cfg.probe.plateau_fraction},
                {"edge_sigma", cfg.probe.edge_sigma}};
  j["detector_size"] = cfg.detector_size;
  j["overlap"] = cfg.overlap;
  j["n_angles"] = cfg.n_angles;
  j["target_max_counts"] = cfg.target_max_counts;
  j["poisson"] = cfg.poisson;
  j["rng_seed"] = cfg.rng_seed;
  j["voxel_size_nm"] = cfg.voxel_size_nm;
  j["wavelength_nm"] = cfg.wavelength_nm;
  j["jitter"] = cfg.jitter;
  j["layer_height"] = cfg.layer_height;
  j["wire_width"] = cfg.wire_width;
  j["wire_pitch"] = cfg.wire_pitch;
  j["band_height"] = cfg.band_height;
  j["disks_per_band"] = cfg.disks_per_band;
  j["min_radius"] = cfg.min_radius;
  j["max_radius"] = cfg.max_radius;
  return j;
}

}  // namespace ptychotomo

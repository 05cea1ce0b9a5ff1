#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ptychotomo {

enum class PhantomKind { chip, circles };

struct Material {
  std::string name;
  double delta = 0.0;
  double beta = 0.0;
};

/// Flat-top Gaussian: unit amplitude inside radius plateau_fraction * Np / 2, Gaussian roll-off
/// with standard deviation edge_sigma outside. edge_sigma <= 0 means Np / 8.
struct ProbeConfig {
  std::size_t size = 8;
  double plateau_fraction = 0.5;
  double edge_sigma = 0.0;
};

struct ScenarioConfig {
  PhantomKind phantom = PhantomKind::chip;
  std::size_t nz = 16;
  std::size_t n = 64;
  /// chip: [wire, via]; circles: [material A, material B]. Empty means default_materials(phantom).
  std::vector<Material> materials;
  ProbeConfig probe;
  std::size_t detector_size = 32;
  double overlap = 0.5;
  std::size_t n_angles = 96;
  double target_max_counts = 8644.0;
  bool poisson = true;
  std::uint64_t rng_seed = 0;
  double voxel_size_nm = 5.0;
  double wavelength_nm = 125.0;
  bool jitter = false;

  // chip layout
  std::size_t layer_height = 4;
  std::size_t wire_width = 2;
  std::size_t wire_pitch = 6;

  // circles layout
  std::size_t band_height = 4;
  std::size_t disks_per_band = 6;
  double min_radius = 2.5;
  double max_radius = 6.0;

  std::vector<Material> resolved_materials() const;

  /// Throws ConfigError on invalid settings.
  void validate() const;
};

/// Default materials for each phantom kind (chosen so the phase budget holds at desk scale).
std::vector<Material> default_materials(PhantomKind kind);

/// Parses a scenario document. "n_angles" may be an integer, "well_sampled" (3N/2) or
/// "under_sampled" (3N/8). Missing keys take the ScenarioConfig defaults.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

}  // namespace ptychotomo

#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "ptychotomo/core/types.hpp"
#include "ptychotomo/simulate/scenario.hpp"

namespace ptychotomo {

// Dataset directory layout:
//   phantom.ptvf   c64 (Nz, N, N) ground truth
//   counts.ptvf    f32 (Ntheta, P, Nd, Nd)
//   probe.ptvf     c64 (Np, Np) unit-scale probe
//   geometry.json  angles, scan positions, detector size, wavelength, voxel size, count scale
//   scenario.json  the resolved scenario
//   manifest.json
struct Dataset {
  ScenarioConfig scenario;
  ExperimentGeometry geometry;
  DiffractionData data;
  std::optional<ObjectVolume> truth;
};

nlohmann::json geometry_to_json(const ExperimentGeometry& g, double count_scale);
/// Fills everything except the probe; returns the count scale.
double geometry_from_json(const nlohmann::json& j, ExperimentGeometry& g);

/// Writes all dataset files except the manifest.
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);
/// Throws DataError on missing or inconsistent files. The phantom is optional.
Dataset read_dataset(const std::filesystem::path& dir);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace ptychotomo

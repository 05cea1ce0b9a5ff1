#include "ptychotomo/cli/dataset.hpp"

#include <fstream>

#include "ptychotomo/core/container.hpp"
#include "ptychotomo/core/error.hpp"

namespace fs = std::filesystem;

namespace ptychotomo {

nlohmann::json geometry_to_json(const ExperimentGeometry& g, double count_scale) {
  nlohmann::json j;
  j["nz"] = g.nz;
  j["n"] = g.n;
  j["angles"] = g.angles;
  j["detector_size"] = g.detector_size;
  j["probe_size"] = g.probe_size();
  j["wavelength_nm"] = g.wavelength_nm;
  j["voxel_size_nm"] = g.voxel_size_nm;
  j["count_scale"] = count_scale;
  auto& scans = j["scan_positions"] = nlohmann::json::array();
  for (const auto& per_angle : g.scan_positions) {
    auto rows = nlohmann::json::array();
    for (const auto& p : per_angle) rows.push_back({p.row, p.col});
    scans.push_back(std::move(rows));
  }
  return j;
}

double geometry_from_json(const nlohmann::json& j, ExperimentGeometry& g) {
  try {
    g.nz = j.at("nz").get<std::size_t>();
    g.n = j.at("n").get<std::size_t>();
    g.angles = j.at("angles").get<std::vector<double>>();
    g.detector_size = j.at("detector_size").get<std::size_t>();
    g.wavelength_nm = j.at("wavelength_nm").get<double>();
    g.voxel_size_nm = j.at("voxel_size_nm").get<double>();
    g.scan_positions.clear();
    for (const auto& rows : j.at("scan_positions")) {
      std::vector<ScanPosition> per_angle;
      for (const auto& p : rows) per_angle.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
      g.scan_positions.push_back(std::move(per_angle));
    }
    return j.at("count_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("geometry.json: ") + e.what());
  }
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("cannot write " + path.string());
}

void write_dataset(const fs::path& dir, const Dataset& ds) {
  fs::create_directories(dir);
  if (ds.truth) save_array(dir / "phantom.ptvf", ds.truth->data, Dtype::c64);
  save_array(dir / "counts.ptvf", ds.data.counts, Dtype::f32);
  save_array(dir / "probe.ptvf", ds.geometry.probe, Dtype::c64);
  write_json_file(dir / "geometry.json", geometry_to_json(ds.geometry, ds.data.scale));
  write_json_file(dir / "scenario.json", scenario_to_json(ds.scenario));
}

Dataset read_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("dataset directory " + dir.string() + " does not exist");
  Dataset ds;
  if (fs::exists(dir / "scenario.json")) {
    try {
      ds.scenario = scenario_from_json(read_json_file(dir / "scenario.json"));
    } catch (const ConfigError& e) {
      throw DataError(std::string("dataset scenario: ") + e.what());
    }
  }
  ds.data.scale = geometry_from_json(read_json_file(dir / "geometry.json"), ds.geometry);
  ds.geometry.probe = load_complex<2>(dir / "probe.ptvf");
  ds.data.counts = load_real<4>(dir / "counts.ptvf");
  if (fs::exists(dir / "phantom.ptvf")) {
    ds.truth = ObjectVolume(load_complex<3>(dir / "phantom.ptvf"), ds.geometry.voxel_size_nm);
    ds.truth->validate();
  }
  ds.geometry.validate();
  ds.data.validate();
  const auto& c = ds.data.counts;
  if (c.extent(0) != ds.geometry.n_angles() || c.extent(1) != ds.geometry.scans_per_angle() ||
      c.extent(2) != ds.geometry.detector_size || c.extent(3) != ds.geometry.detector_size) {
    throw DataError("counts shape " + shape_string(c.shape()) + " does not match geometry.json");
  }
  if (ds.truth && (ds.truth->nz() != ds.geometry.nz || ds.truth->n() != ds.geometry.n)) {
    throw DataError("phantom shape does not match geometry.json");
  }
  return ds;
}

}  // namespace ptychotomo

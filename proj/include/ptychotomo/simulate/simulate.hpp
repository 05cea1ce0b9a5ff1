#pragma once

#include <cstdint>
#include <vector>

#include "ptychotomo/core/types.hpp"
#include "ptychotomo/simulate/scenario.hpp"

namespace ptychotomo {

struct Disk {
  std::size_t band = 0;
  double row = 0.0;
  double col = 0.0;
  double radius = 0.0;
  std::size_t material = 0;
};

ObjectVolume make_chip_phantom(const ScenarioConfig& cfg);

/// Seeded non-overlapping disk layout, one set per slice band.
std::vector<Disk> make_circles_layout(const ScenarioConfig& cfg);
ObjectVolume make_circles_phantom(const ScenarioConfig& cfg);
ObjectVolume make_phantom(const ScenarioConfig& cfg);

Array2c make_probe(const ProbeConfig& cfg);

/// Raster step round(Np * (1 - overlap)).
std::size_t scan_step(std::size_t probe_size, double overlap);

/// Raster positions along one axis of length `extent`; the last window is clipped to the edge.
std::vector<int> raster_axis(std::size_t extent, std::size_t probe_size, std::size_t step);

/// Row-major raster over the (Nz, N) slab, shared by every angle.
std::vector<ScanPosition> make_scan_grid(std::size_t probe_size, double overlap, std::size_t nz, std::size_t n);

/// theta_k = k * pi / n_angles, k = 0..n_angles-1.
std::vector<double> angle_grid(std::size_t n_angles);

/// Angle count 3N/2 (Nyquist, well-sampled) or 3N/8 (under-sampled), rounded to nearest.
std::size_t well_sampled_angles(std::size_t n);
std::size_t under_sampled_angles(std::size_t n);

ExperimentGeometry make_geometry(const ScenarioConfig& cfg);

/// Noiseless far-field intensity |G H x|^2 for the unit-scale probe.
Array4d noiseless_intensity(const ObjectVolume& x, const ExperimentGeometry& geom);

/// Simulates counts with the probe amplitude scaled so the noiseless maximum equals
/// target_max_counts. With poisson == false the scaled intensity itself is returned.
DiffractionData simulate_data(const ObjectVolume& x, const ExperimentGeometry& geom, double target_max_counts,
                              std::uint64_t seed, bool poisson = true);

/// max |c * R delta| over all rays.
double max_phase(const ObjectVolume& x, const ExperimentGeometry& geom);

/// Counter-based generator keyed by (seed, angle, position, pixel): draws are independent of
/// evaluation order, so parallel simulation is bit-reproducible.
class KeyedRng {
 public:
  using result_type = std::uint64_t;
  KeyedRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t state_;
};

}  // namespace ptychotomo

#pragma once

#include <cmath>
#include <random>

#include "ptychotomo/core/array.hpp"
#include "ptychotomo/core/types.hpp"

namespace testutil {

using namespace ptychotomo;

template <typename T, std::size_t R>
Array<T, R> random_array(const typename Array<T, R>::Shape& shape, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  Array<T, R> a(shape);
  for (auto& v : a) {
    if constexpr (std::is_same_v<T, Complex>) {
      v = Complex(n(rng), n(rng));
    } else {
      v = n(rng);
    }
  }
  return a;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Small geometry: nz x n slab, probe np (random complex), detector nd, raster with the given step.
inline ExperimentGeometry small_geometry(std::size_t nz, std::size_t n, std::size_t np, std::size_t nd,
                                         std::vector<double> angles, std::size_t step, std::uint64_t seed) {
  ExperimentGeometry g;
  g.nz = nz;
  g.n = n;
  g.angles = std::move(angles);
  g.probe = random_array<Complex, 2>({np, np}, seed);
  g.detector_size = nd;
  g.wavelength_nm = 40.0;
  g.voxel_size_nm = 5.0;
  std::vector<ScanPosition> grid;
  for (std::size_t r = 0; r + np <= nz; r += step) {
    for (std::size_t c = 0; c + np <= n; c += step) grid.push_back({static_cast<int>(r), static_cast<int>(c)});
  }
  g.scan_positions.assign(g.angles.size(), grid);
  return g;
}

}  // namespace testutil

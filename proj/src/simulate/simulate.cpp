#include "ptychotomo/simulate/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/parallel.hpp"
#include "ptychotomo/operators/ptycho.hpp"
#include "ptychotomo/operators/radon.hpp"

namespace ptychotomo {

namespace {

// Distribution helpers on top of mt19937_64, whose output sequence is fixed by the standard,
// so layouts are identical across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

long uniform_int(std::mt19937_64& rng, long lo, long hi) {  // inclusive
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<long>(rng() % span);
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void set_voxel(ObjectVolume& x, std::size_t z, long r, long c, const Material& m) {
  const auto n = static_cast<long>(x.n());
  if (r < 0 || c < 0 || r >= n || c >= n) return;
  x.data(z, static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = Complex(m.delta, m.beta);
}

}  // namespace

KeyedRng::KeyedRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c)
    : state_(splitmix(splitmix(splitmix(splitmix(seed) ^ a) ^ b) ^ c)) {}

KeyedRng::result_type KeyedRng::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ObjectVolume make_chip_phantom(const ScenarioConfig& cfg) {
  cfg.validate();
  ObjectVolume x(cfg.nz, cfg.n, cfg.voxel_size_nm);
  const auto mats = cfg.resolved_materials();
  const Material& wire = mats[0];
  const Material& via = mats.size() > 1 ? mats[1] : mats[0];
  std::mt19937_64 rng(cfg.rng_seed);

  // Features stay inside the square inscribed in the reconstruction circle.
  const double centre = 0.5 * static_cast<double>(cfg.n - 1);
  const double half = (0.5 * static_cast<double>(cfg.n) - 1.0) / std::numbers::sqrt2;
  const long lo = static_cast<long>(std::ceil(centre - half));
  const long hi = static_cast<long>(std::floor(centre + half));
  const long span = hi - lo + 1;
  const auto width = static_cast<long>(cfg.wire_width);
  const auto pitch = static_cast<long>(cfg.wire_pitch);

  const std::size_t bands = (cfg.nz + cfg.layer_height - 1) / cfg.layer_height;
  for (std::size_t b = 0; b < bands; ++b) {
    const std::size_t z0 = b * cfg.layer_height;
    const std::size_t z1 = std::min(cfg.nz, z0 + cfg.layer_height);
    // the last slice of a band is a spacer crossed only by vias
    const std::size_t wire_end = (z1 - z0 >= 2) ? z1 - 1 : z1;
    const bool has_spacer = wire_end < z1;
    const bool vertical = (b % 2) == 1;
    for (long off = lo + uniform_int(rng, 0, pitch - 1); off + width - 1 <= hi; off += pitch) {
      if (uniform01(rng) < 0.2) continue;  // missing wire
      const long start = lo + uniform_int(rng, 0, span / 4);
      const long end = hi - uniform_int(rng, 0, span / 4);
      long gap_lo = 0, gap_hi = -1;
      if (uniform01(rng) < 0.3 && end - start > 12) {
        gap_lo = uniform_int(rng, start + 3, end - 9);
        gap_hi = gap_lo + uniform_int(rng, 3, 6);
      }
      for (std::size_t z = z0; z < wire_end; ++z) {
        for (long w = 0; w < width; ++w) {
          for (long t = start; t <= end; ++t) {
            if (t >= gap_lo && t <= gap_hi) continue;
            if (vertical) set_voxel(x, z, t, off + w, wire);
            else set_voxel(x, z, off + w, t, wire);
          }
        }
      }
      if (has_spacer && uniform01(rng) < 0.5) {
        const long at = uniform_int(rng, start, std::max(start, end - width));
        for (long w = 0; w < width; ++w) {
          for (long t = at; t < at + width; ++t) {
            if (vertical) set_voxel(x, z1 - 1, t, off + w, via);
            else set_voxel(x, z1 - 1, off + w, t, via);
          }
        }
      }
    }
  }
  return x;
}

std::vector<Disk> make_circles_layout(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  const auto mats = cfg.resolved_materials();
  const double centre = 0.5 * static_cast<double>(cfg.n - 1);
  const double field = 0.5 * static_cast<double>(cfg.n) - 1.0;
  const std::size_t bands = (cfg.nz + cfg.band_height - 1) / cfg.band_height;
  std::vector<Disk> disks;
  for (std::size_t b = 0; b < bands; ++b) {
    const std::size_t first = disks.size();
    std::size_t placed = 0;
    for (int attempt = 0; attempt < 2000 && placed < cfg.disks_per_band; ++attempt) {
      const double r = uniform(rng, cfg.min_radius, cfg.max_radius);
      if (r >= field) continue;
      const double rho = (field - r) * std::sqrt(uniform01(rng));
      const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      Disk d{b, centre + rho * std::sin(phi), centre + rho * std::cos(phi), r,
             static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(mats.size() > 1 ? 1 : 0)))};
      bool clear = true;
      for (std::size_t k = first; k < disks.size() && clear; ++k) {
        clear = std::hypot(d.row - disks[k].row, d.col - disks[k].col) > d.radius + disks[k].radius;
      }
      if (!clear) continue;
      disks.push_back(d);
      ++placed;
    }
  }
  return disks;
}

ObjectVolume make_circles_phantom(const ScenarioConfig& cfg) {
  const auto disks = make_circles_layout(cfg);
  const auto mats = cfg.resolved_materials();
  ObjectVolume x(cfg.nz, cfg.n, cfg.voxel_size_nm);
  for (const auto& d : disks) {
    const std::size_t z0 = d.band * cfg.band_height;
    const std::size_t z1 = std::min(cfg.nz, z0 + cfg.band_height);
    for (std::size_t z = z0; z < z1; ++z) {
      for (long i = static_cast<long>(std::floor(d.row - d.radius)); i <= static_cast<long>(std::ceil(d.row + d.radius)); ++i) {
        for (long j = static_cast<long>(std::floor(d.col - d.radius)); j <= static_cast<long>(std::ceil(d.col + d.radius)); ++j) {
          const double di = static_cast<double>(i) - d.row;
          const double dj = static_cast<double>(j) - d.col;
          if (di * di + dj * dj <= d.radius * d.radius) set_voxel(x, z, i, j, mats[d.material]);
        }
      }
    }
  }
  return x;
}

ObjectVolume make_phantom(const ScenarioConfig& cfg) {
  return cfg.phantom == PhantomKind::chip ? make_chip_phantom(cfg) : make_circles_phantom(cfg);
}

Array2c make_probe(const ProbeConfig& cfg) {
  const std::size_t np = cfg.size;
  const double c = 0.5 * static_cast<double>(np - 1);
  const double plateau = cfg.plateau_fraction * 0.5 * static_cast<double>(np);
  const double sigma = cfg.edge_sigma > 0.0 ? cfg.edge_sigma : static_cast<double>(np) / 8.0;
  Array2c probe({np, np});
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double r = std::hypot(static_cast<double>(i) - c, static_cast<double>(j) - c);
      const double e = std::max(0.0, r - plateau);
      probe(i, j) = std::exp(-e * e / (2.0 * sigma * sigma));
    }
  }
  return probe;
}

std::size_t scan_step(std::size_t probe_size, double overlap) {
  return static_cast<std::size_t>(std::lround(static_cast<double>(probe_size) * (1.0 - overlap)));
}

std::vector<int> raster_axis(std::size_t extent, std::size_t probe_size, std::size_t step) {
  if (probe_size > extent) throw ConfigError("scan grid: probe larger than the object");
  if (step < 1) throw ConfigError("scan grid: step below one pixel");
  if (step >= probe_size) throw ConfigError("scan grid: step >= probe size leaves no overlap");
  const auto last = static_cast<int>(extent - probe_size);
  std::vector<int> out;
  for (int p = 0;; p += static_cast<int>(step)) {
    if (p >= last) {
      out.push_back(last);
      break;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<ScanPosition> make_scan_grid(std::size_t probe_size, double overlap, std::size_t nz, std::size_t n) {
  const std::size_t step = scan_step(probe_size, overlap);
  const auto rows = raster_axis(nz, probe_size, step);
  const auto cols = raster_axis(n, probe_size, step);
  std::vector<ScanPosition> grid;
  grid.reserve(rows.size() * cols.size());
  for (int r : rows) {
    for (int c : cols) grid.push_back({r, c});
  }
  return grid;
}

std::vector<double> angle_grid(std::size_t n_angles) {
  std::vector<double> a(n_angles);
  for (std::size_t k = 0; k < n_angles; ++k) {
    a[k] = static_cast<double>(k) * std::numbers::pi / static_cast<double>(n_angles);
  }
  return a;
}

std::size_t well_sampled_angles(std::size_t n) { return static_cast<std::size_t>(std::lround(1.5 * static_cast<double>(n))); }
std::size_t under_sampled_angles(std::size_t n) { return static_cast<std::size_t>(std::lround(0.375 * static_cast<double>(n))); }

ExperimentGeometry make_geometry(const ScenarioConfig& cfg) {
  cfg.validate();
  ExperimentGeometry g;
  g.nz = cfg.nz;
  g.n = cfg.n;
  g.angles = angle_grid(cfg.n_angles);
  g.probe = make_probe(cfg.probe);
  g.detector_size = cfg.detector_size;
  g.wavelength_nm = cfg.wavelength_nm;
  g.voxel_size_nm = cfg.voxel_size_nm;
  const auto grid = make_scan_grid(cfg.probe.size, cfg.overlap, cfg.nz, cfg.n);
  g.scan_positions.assign(cfg.n_angles, grid);
  if (cfg.jitter) {
    // seeded +-1 pixel jitter per angle, kept inside the slab
    const int max_r = static_cast<int>(cfg.nz - cfg.probe.size);
    const int max_c = static_cast<int>(cfg.n - cfg.probe.size);
    for (std::size_t a = 0; a < cfg.n_angles; ++a) {
      KeyedRng rng(cfg.rng_seed, 0x6a697474ULL, a, 0);
      for (auto& p : g.scan_positions[a]) {
        p.row = std::clamp(p.row + static_cast<int>(rng() % 3) - 1, 0, max_r);
        p.col = std::clamp(p.col + static_cast<int>(rng() % 3) - 1, 0, max_c);
      }
    }
  }
  g.validate();
  return g;
}

Array4d noiseless_intensity(const ObjectVolume& x, const ExperimentGeometry& geom) {
  x.validate();
  const RadonPlan plan(geom.nz, geom.n, geom.angles);
  const Array3c psi = transmission(x.data, plan, geom.wavenumber());
  const Array4c far = PtychoOperator(geom).forward(psi);
  Array4d out(far.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(far[i]);
  return out;
}

DiffractionData simulate_data(const ObjectVolume& x, const ExperimentGeometry& geom, double target_max_counts,
                              std::uint64_t seed, bool poisson) {
  if (!(target_max_counts > 0.0)) throw ConfigError("simulate: target_max_counts must be > 0");
  const Array4d intensity = noiseless_intensity(x, geom);
  const double peak = *std::max_element(intensity.begin(), intensity.end());
  if (!(peak > 0.0)) throw DataError("simulate: noiseless intensity is identically zero");
  const double s2 = target_max_counts / peak;

  DiffractionData out{Array4d(intensity.shape()), std::sqrt(s2)};
  if (!poisson) {
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] = s2 * intensity[i];
    return out;
  }
  const std::size_t n_angles = intensity.extent(0);
  const std::size_t n_scan = intensity.extent(1);
  const std::size_t pixels = intensity.extent(2) * intensity.extent(3);
  parallel_for(n_angles, [&](std::size_t a) {
    for (std::size_t s = 0; s < n_scan; ++s) {
      const std::size_t base = (a * n_scan + s) * pixels;
      for (std::size_t p = 0; p < pixels; ++p) {
        const double mean = s2 * intensity[base + p];
        if (!(mean > 0.0)) {
          out.counts[base + p] = 0.0;
          continue;
        }
        KeyedRng rng(seed, a, s, p);
        std::poisson_distribution<long long> draw(mean);
        out.counts[base + p] = static_cast<double>(draw(rng));
      }
    }
  });
  return out;
}

double max_phase(const ObjectVolume& x, const ExperimentGeometry& geom) {
  Array3d delta(x.data.shape());
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = x.data[i].real();
  const RadonPlan plan(geom.nz, geom.n, geom.angles);
  const Array3d rd = radon_forward(delta, plan);
  double m = 0.0;
  for (double v : rd) m = std::max(m, std::abs(v));
  return geom.wavenumber() * m;
}

}  // namespace ptychotomo

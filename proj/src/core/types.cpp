#include "ptychotomo/core/types.hpp"

#include <cmath>
#include <numbers>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/vector_ops.hpp"

namespace ptychotomo {

void ObjectVolume::validate() const {
  const auto& s = data.shape();
  if (s[0] < 1 || s[1] < 2 || s[1] != s[2]) {
    throw DataError("object volume must have shape (Nz>=1, N>=2, N), got " + shape_string(s));
  }
  if (!all_finite(data.flat())) throw DataError("object volume has non-finite entries");
}

double ExperimentGeometry::wavenumber() const {
  return 2.0 * std::numbers::pi * voxel_size_nm / wavelength_nm;
}

void ExperimentGeometry::validate() const {
  if (nz < 1 || n < 2) throw ConfigError("geometry: object slab must be at least 1 x 2");
  if (angles.empty()) throw ConfigError("geometry: no rotation angles");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!(angles[i] >= 0.0 && angles[i] < std::numbers::pi)) {
      throw ConfigError("geometry: angle outside [0, pi)");
    }
    if (i > 0 && !(angles[i] > angles[i - 1])) {
      throw ConfigError("geometry: angles must be strictly increasing");
    }
  }
  if (probe.extent(0) == 0 || probe.extent(0) != probe.extent(1)) {
    throw ConfigError("geometry: probe must be square and non-empty");
  }
  const std::size_t np = probe.extent(0);
  if (detector_size < np) throw ConfigError("geometry: detector smaller than probe");
  if (detector_size % 2 != 0) throw ConfigError("geometry: detector size must be even");
  if (!(wavelength_nm > 0.0) || !(voxel_size_nm > 0.0)) {
    throw ConfigError("geometry: wavelength and voxel size must be positive");
  }
  if (scan_positions.size() != angles.size()) {
    throw ConfigError("geometry: need one scan-position list per angle");
  }
  const std::size_t per_angle = scans_per_angle();
  if (per_angle == 0) throw ConfigError("geometry: empty scan grid");
  for (const auto& list : scan_positions) {
    if (list.size() != per_angle) {
      throw ConfigError("geometry: every angle must use the same number of scan positions");
    }
    for (const auto& p : list) {
      if (p.row < 0 || p.col < 0 || static_cast<std::size_t>(p.row) + np > nz ||
          static_cast<std::size_t>(p.col) + np > n) {
        throw ConfigError("geometry: scan position (" + std::to_string(p.row) + ", " +
                          std::to_string(p.col) + ") puts the probe window outside the slab");
      }
    }
  }
}

void DiffractionData::validate() const {
  for (double v : counts) {
    if (!std::isfinite(v) || v < 0.0) throw DataError("diffraction counts must be finite and >= 0");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DataError("diffraction scale must be positive");
}

void ReconConfig::validate() const {
  if (!(rho > 0.0)) throw ConfigError("rho must be > 0");
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  if (!(varphi > 0.0)) throw ConfigError("varphi must be > 0");
  if (outer_iters < 0) throw ConfigError("outer_iters must be >= 0");
  if (inner_cg_iters < 1) throw ConfigError("inner_cg_iters must be >= 1");
  if (tomo_cg_iters < 1) throw ConfigError("tomo_cg_iters must be >= 1");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw ConfigError("armijo_c1 must be in (0, 1)");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) throw ConfigError("step_shrink must be in (0, 1)");
  if (!(initial_step > 0.0)) throw ConfigError("initial_step must be > 0");
  if (max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

SplitVolume split_complex(const ObjectVolume& x) {
  SplitVolume out{Array3d(x.data.shape()), Array3d(x.data.shape())};
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    out.delta[i] = x.data[i].real();
    out.beta[i] = x.data[i].imag();
  }
  return out;
}

Array3c combine_complex(const Array3d& delta, const Array3d& beta) {
  if (delta.shape() != beta.shape()) throw DataError("combine_complex: shape mismatch");
  Array3c out(delta.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(delta[i], beta[i]);
  return out;
}

}  // namespace ptychotomo

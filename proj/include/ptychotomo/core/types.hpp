#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

/// Complex refractive-index decrement x = delta + i*beta on a (Nz, N, N) voxel grid.
struct ObjectVolume {
  Array3c data;
  double voxel_size_nm = 1.0;

  ObjectVolume() = default;
  ObjectVolume(std::size_t nz, std::size_t n, double voxel_size = 1.0)
      : data({nz, n, n}), voxel_size_nm(voxel_size) {}
  explicit ObjectVolume(Array3c values, double voxel_size = 1.0)
      : data(std::move(values)), voxel_size_nm(voxel_size) {}

  std::size_t nz() const { return data.extent(0); }
  std::size_t n() const { return data.extent(1); }

  /// Throws DataError unless the shape is (Nz >= 1, N >= 2, N) with finite entries.
  void validate() const;
};

/// Per-angle complex transmission functions, shape (Ntheta, Nz, N). Also used for the dual lambda.
struct TransmissionSet {
  Array3c data;

  std::size_t n_angles() const { return data.extent(0); }
  std::size_t nz() const { return data.extent(1); }
  std::size_t n() const { return data.extent(2); }
};

struct ScanPosition {
  int row = 0;  ///< top-left probe anchor, object-frame pixels
  int col = 0;
  bool operator==(const ScanPosition&) const = default;
};

struct ExperimentGeometry {
  std::size_t nz = 0;  ///< object height (rotation axis)
  std::size_t n = 0;   ///< object width
  std::vector<double> angles;  ///< radians, strictly increasing in [0, pi)
  Array2c probe;               ///< (Np, Np), unit amplitude scale
  std::vector<std::vector<ScanPosition>> scan_positions;  ///< per angle
  std::size_t detector_size = 0;                          ///< Nd (square detector)
  double wavelength_nm = 1.0;
  double voxel_size_nm = 1.0;

  std::size_t n_angles() const { return angles.size(); }
  std::size_t probe_size() const { return probe.extent(0); }
  std::size_t scans_per_angle() const {
    return scan_positions.empty() ? 0 : scan_positions.front().size();
  }
  /// Wavelength measured in voxels.
  double wavelength_voxels() const { return wavelength_nm / voxel_size_nm; }
  /// Wavenumber c = 2*pi*voxel_size/wavelength, so that c * (R x) is a phase in radians
  /// when R integrates in voxel units.
  double wavenumber() const;

  /// Throws ConfigError on any violated invariant (probe window outside the slab,
  /// non-increasing angles, Nd < Np, odd Nd, ragged scan lists).
  void validate() const;
};

/// Photon counts, shape (Ntheta, Nscan, Nd, Nd). `scale` is the probe amplitude factor s used
/// by the simulator: the expected counts are s^2 * |G psi|^2 for the unit-scale probe.
struct DiffractionData {
  Array4d counts;
  double scale = 1.0;

  void validate() const;
};

/// All solver parameters. Schedule and denoiser are textual selectors parsed by the denoise module,
/// e.g. "incremental_final:0.3" or "tv:0.08:100".
struct ReconConfig {
  double rho = 0.5;
  double tau = 0.5;
  double varphi = 1.0;  ///< only reported, via sigma^2 = tau / (2 varphi)
  int outer_iters = 250;
  int inner_cg_iters = 4;  ///< CG iterations of each psi-subproblem
  int tomo_cg_iters = 4;   ///< CG iterations of the x-subproblem
  /// Restrict x (and the denoised eta) to the disk of radius N/2 - 1, the region every angle sees.
  bool fov_support = true;
  /// Rotate each angle's psi so the columns whose rays miss the support disk have zero mean phase.
  /// Needs fov_support.
  bool phase_reference = true;
  /// Project delta and beta of x onto [0, inf) after each x-step.
  bool nonnegative = false;
  std::string alpha_schedule = "constant:0";
  std::string denoiser = "identity";
  std::uint64_t rng_seed = 0;

  // backtracking line search
  double armijo_c1 = 1e-4;
  double step_shrink = 0.5;
  double initial_step = 1.0;
  int max_halvings = 20;

  int checkpoint_every = 0;  ///< 0 disables checkpointing

  /// sigma^2 = tau / (2 varphi): the Gaussian noise level the denoising step nominally removes.
  double implied_noise_variance() const { return tau / (2.0 * varphi); }

  void validate() const;
};

struct SplitVolume {
  Array3d delta;
  Array3d beta;
};

/// delta = Re(x), beta = Im(x).
SplitVolume split_complex(const ObjectVolume& x);
Array3c combine_complex(const Array3d& delta, const Array3d& beta);

}  // namespace ptychotomo

#pragma once

#include <span>

#include "ptychotomo/core/array.hpp"
#include "ptychotomo/core/types.hpp"
#include "ptychotomo/operators/fft.hpp"

namespace ptychotomo {

/// G = F Q: per scan position, crop the Np x Np window of psi, multiply by the probe,
/// zero-pad centered to Nd x Nd and apply the unitary centered DFT.
class PtychoOperator {
 public:
  explicit PtychoOperator(ExperimentGeometry geom);

  const ExperimentGeometry& geometry() const noexcept { return geom_; }
  std::size_t frame_size() const noexcept { return nd_ * nd_; }
  /// Values per angle in detector space: Nscan * Nd * Nd.
  std::size_t frames_per_angle_size() const noexcept { return geom_.scans_per_angle() * nd_ * nd_; }
  /// Values per angle in object space: Nz * N.
  std::size_t slab_size() const noexcept { return geom_.nz * geom_.n; }

  /// psi_slab: (Nz, N) for one angle; frames: (Nscan, Nd, Nd), overwritten.
  void forward_angle(std::size_t angle, std::span<const Complex> psi_slab, std::span<Complex> frames) const;
  /// frames: (Nscan, Nd, Nd); psi_slab: (Nz, N), overwritten with G^H frames.
  void adjoint_angle(std::size_t angle, std::span<const Complex> frames, std::span<Complex> psi_slab) const;

  Array4c forward(const Array3c& psi) const;
  Array3c adjoint(const Array4c& frames) const;

 private:
  ExperimentGeometry geom_;
  std::size_t np_;
  std::size_t nd_;
  std::size_t pad_;
  CenteredFft2 fft_;
};

Array4c ptycho_forward(const Array3c& psi, const ExperimentGeometry& geom);
Array3c ptycho_adjoint(const Array4c& frames, const ExperimentGeometry& geom);

}  // namespace ptychotomo

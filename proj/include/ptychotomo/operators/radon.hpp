#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

/// Slice-wise parallel-beam Radon transform with bilinear interpolation.
///
/// Ray (theta, u) of slice z samples the slice at unit spacing t = 0..N-1 along
///   col = c + (u - c) cos(theta) - (t - c) sin(theta)
///   row = c + (u - c) sin(theta) + (t - c) cos(theta),   c = (N - 1) / 2,
/// so at theta = 0 the ray through detector bin u is image column u. Interpolation taps are
/// precomputed once; the adjoint scatters the same taps, which makes it the exact transpose.
class RadonPlan {
 public:
  RadonPlan(std::size_t nz, std::size_t n, std::vector<double> angles);

  std::size_t nz() const noexcept { return nz_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t n_angles() const noexcept { return angles_.size(); }
  const std::vector<double>& angles() const noexcept { return angles_; }

  struct Tap {
    std::uint32_t pixel;  ///< row * N + col within a slice
    double weight;
  };

  /// Taps of ray (angle, u).
  std::span<const Tap> ray(std::size_t angle, std::size_t u) const {
    const std::size_t r = angle * n_ + u;
    return std::span<const Tap>(taps_).subspan(ray_begin_[r], ray_begin_[r + 1] - ray_begin_[r]);
  }

 private:
  std::size_t nz_;
  std::size_t n_;
  std::vector<double> angles_;
  std::vector<Tap> taps_;
  std::vector<std::size_t> ray_begin_;
};

/// Per-slice (N * N) indicator of the disk of the given radius about the slice centre
/// ((N - 1) / 2, (N - 1) / 2).
std::vector<double> disk_support(std::size_t n, double radius);

/// (Nz, N, N) -> (Ntheta, Nz, N) line integrals in voxel-length units.
template <typename T>
Array<T, 3> radon_forward(const Array<T, 3>& x, const RadonPlan& plan);

/// (Ntheta, Nz, N) -> (Nz, N, N), the transpose of radon_forward.
template <typename T>
Array<T, 3> radon_adjoint(const Array<T, 3>& p, const RadonPlan& plan);

/// H x = exp(i c R x).
Array3c transmission(const Array3c& x, const RadonPlan& plan, double wavenumber);

}  // namespace ptychotomo

#pragma once

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

// Per-slice 2D filters on (M, N, N) batches. All use symmetric (mirror) boundaries and map
// constant slices to themselves.

Array3d denoise_identity(const Array3d& v);

/// Separable Gaussian, kernel radius ceil(3 sigma). sigma > 0.
Array3d denoise_gaussian(const Array3d& v, double sigma);

/// Median over a width x width window. width odd and >= 1.
Array3d denoise_median(const Array3d& v, int width);

/// ROF proximal map argmin_u TV(u) + ||u - v||^2 / (2 weight) per slice, by Chambolle's
/// projected dual iteration with step 1/8 for a fixed number of iterations. Isotropic TV,
/// forward differences with Neumann boundary.
Array3d denoise_tv(const Array3d& v, double weight, int iters);

}  // namespace ptychotomo

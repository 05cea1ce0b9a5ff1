#pragma once

#include <cstddef>

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

/// Below this modulus w*Log(w) is replaced by its limit 0.
inline constexpr double kZetaFloor = 1e-12;

/// K applied to R x: (2*pi*i / nu) * psi_hat * rx, elementwise. `nu` is the wavelength in
/// voxel units, so 2*pi/nu is the same wavenumber used by the transmission map.
Array3c k_operator(const Array3c& rx, const Array3c& psi_hat, double nu);

/// K^H y: elementwise multiplication by conj((2*pi*i / nu) * psi_hat).
Array3c k_operator_adjoint(const Array3c& y, const Array3c& psi_hat, double nu);

/// zeta = w * Log(w) with the principal-branch logarithm, w = psi_hat.
/// Entries with |w| < kZetaFloor map to 0; their number is added to *floored when given.
Array3c zeta_term(const Array3c& psi_hat, std::size_t* floored = nullptr);

}  // namespace ptychotomo

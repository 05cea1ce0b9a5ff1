#pragma once

#include <string>

#include "ptychotomo/core/types.hpp"

namespace ptychotomo {

/// PSNR of delta = Re(x) in dB: 10 log10(peak^2 / MSE), peak = max |delta_truth|.
/// Returns +infinity when the MSE is zero. Throws DataError on a shape mismatch.
double psnr(const ObjectVolume& recon, const ObjectVolume& truth);

/// "inf" for the infinite sentinel, otherwise fixed with the given decimals.
std::string format_db(double db, int decimals = 2);

}  // namespace ptychotomo

#include "ptychotomo/cli/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ptychotomo/core/error.hpp"

namespace ptychotomo {

double psnr(const ObjectVolume& recon, const ObjectVolume& truth) {
  if (recon.data.shape() != truth.data.shape()) {
    throw DataError("psnr: shape " + shape_string(recon.data.shape()) + " vs truth " +
                    shape_string(truth.data.shape()));
  }
  double peak = 0.0, se = 0.0;
  for (std::size_t i = 0; i < truth.data.size(); ++i) {
    const double t = truth.data[i].real();
    peak = std::max(peak, std::abs(t));
    const double e = recon.data[i].real() - t;
    se += e * e;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(truth.data.size());
  return 10.0 * std::log10(peak * peak / mse);
}

std::string format_db(double db, int decimals) {
  if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << db;
  return os.str();
}

}  // namespace ptychotomo

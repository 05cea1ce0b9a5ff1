#include "ptychotomo/denoise/slice_batch.hpp"

#include <algorithm>

namespace ptychotomo {

SliceBatch SliceBatch::normalize(Array3d raw) {
  SliceBatch b{std::move(raw), 0.0, 0.0, true};
  if (b.data.size() == 0) return b;
  const auto [mn, mx] = std::minmax_element(b.data.begin(), b.data.end());
  b.lo = *mn;
  b.hi = *mx;
  const double range = b.hi - b.lo;
  for (double& v : b.data) v = range > 0.0 ? (v - b.lo) / range : 0.0;
  return b;
}

Array3d SliceBatch::restore() const {
  Array3d out = data;
  if (!normalized) return out;
  const double range = hi - lo;
  for (double& v : out) v = lo + v * range;
  return out;
}

}  // namespace ptychotomo

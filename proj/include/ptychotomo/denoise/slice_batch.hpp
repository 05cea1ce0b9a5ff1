#pragma once

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

/// M slices of shape (N, N), plus the (min, max) range used to map them to [0, 1].
struct SliceBatch {
  Array3d data;
  double lo = 0.0;
  double hi = 1.0;
  bool normalized = false;

  /// Maps data to [0, 1] by the batch minimum and maximum. A constant batch maps to 0.
  static SliceBatch normalize(Array3d raw);
  /// Inverse of normalize(); returns data unchanged when the batch was not normalized.
  Array3d restore() const;
};

}  // namespace ptychotomo

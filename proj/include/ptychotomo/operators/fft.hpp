#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

/// Unitary, centered 2D DFT on n x n frames (n even): zero frequency sits at index (n/2, n/2).
/// Thread-safe: plans are created once and executed on caller-owned buffers.
class CenteredFft2 {
 public:
  explicit CenteredFft2(std::size_t n);
  ~CenteredFft2();
  CenteredFft2(CenteredFft2&&) noexcept;
  CenteredFft2& operator=(CenteredFft2&&) noexcept;
  CenteredFft2(const CenteredFft2&) = delete;
  CenteredFft2& operator=(const CenteredFft2&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// In place; frame holds n*n values, row-major.
  void forward(std::span<Complex> frame) const;
  /// In place; exact inverse and adjoint of forward().
  void inverse(std::span<Complex> frame) const;

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace ptychotomo

#pragma once

#include <cmath>
#include <span>

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

/// Real inner product Re(a^H b). This is the metric the Wirtinger gradients live in.
inline double real_dot(std::span<const Complex> a, std::span<const Complex> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  }
  return acc;
}

inline double real_dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Hermitian inner product a^H b.
inline Complex hermitian_dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double norm_sq(std::span<const Complex> a) {
  double acc = 0.0;
  for (const auto& v : a) acc += std::norm(v);
  return acc;
}

inline double norm_sq(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

inline double norm2(std::span<const Complex> a) { return std::sqrt(norm_sq(a)); }
inline double norm2(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

/// y += alpha * x
inline void axpy(double alpha, std::span<const Complex> x, std::span<Complex> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline bool all_finite(std::span<const Complex> a) {
  for (const auto& v : a) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

/// ||a - b||_2
inline double distance(std::span<const Complex> a, std::span<const Complex> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace ptychotomo

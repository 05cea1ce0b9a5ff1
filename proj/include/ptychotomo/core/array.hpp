#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptychotomo {

using Complex = std::complex<double>;

/// Dense row-major array of fixed rank. Owns its storage.
template <typename T, std::size_t Rank>
class Array {
 public:
  using value_type = T;
  using Shape = std::array<std::size_t, Rank>;

  Array() { shape_.fill(0); }

  explicit Array(const Shape& shape, T fill = T{})
      : shape_(shape), data_(element_count(shape), fill) {}

  Array(const Shape& shape, std::vector<T> values) : shape_(shape), data_(std::move(values)) {
    if (data_.size() != element_count(shape_)) {
      throw std::invalid_argument("Array: value count does not match shape");
    }
  }

  static std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t extent(std::size_t dim) const { return shape_.at(dim); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  template <typename... I>
  T& operator()(I... idx) noexcept {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(static_cast<std::size_t>(idx)...)];
  }
  template <typename... I>
  const T& operator()(I... idx) const noexcept {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(static_cast<std::size_t>(idx)...)];
  }

  /// Contiguous block belonging to leading index i.
  std::span<T> slab(std::size_t i) {
    const std::size_t len = Rank == 0 || shape_[0] == 0 ? 0 : data_.size() / shape_[0];
    return std::span<T>(data_).subspan(i * len, len);
  }
  std::span<const T> slab(std::size_t i) const {
    const std::size_t len = Rank == 0 || shape_[0] == 0 ? 0 : data_.size() / shape_[0];
    return std::span<const T>(data_).subspan(i * len, len);
  }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Array& other) const = default;

 private:
  template <typename... I>
  std::size_t offset(I... idx) const noexcept {
    const std::array<std::size_t, Rank> ids{idx...};
    std::size_t off = 0;
    for (std::size_t d = 0; d < Rank; ++d) off = off * shape_[d] + ids[d];
    return off;
  }

  Shape shape_;
  std::vector<T> data_;
};

using Array2c = Array<Complex, 2>;
using Array3c = Array<Complex, 3>;
using Array4c = Array<Complex, 4>;
using Array2d = Array<double, 2>;
using Array3d = Array<double, 3>;
using Array4d = Array<double, 4>;

template <std::size_t Rank>
std::string shape_string(const std::array<std::size_t, Rank>& shape) {
  std::string s = "(";
  for (std::size_t d = 0; d < Rank; ++d) {
    if (d) s += ", ";
    s += std::to_string(shape[d]);
  }
  return s + ")";
}

}  // namespace ptychotomo

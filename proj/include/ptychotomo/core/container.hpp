#pragma once

// Binary volume container shared by every module:
//   "PTVF" | u32 LE header length | UTF-8 JSON header | raw little-endian payload
// Header: {"shape":[...], "dtype":"c64"|"f32"|"c128"|"f64", "order":"row-major"}.
// c64/f32 are the interchange dtypes; c128/f64 exist so checkpoints restore bit-exactly.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ptychotomo/core/array.hpp"
#include "ptychotomo/core/error.hpp"

namespace ptychotomo {

enum class Dtype { c64, f32, c128, f64 };

std::string dtype_name(Dtype d);
Dtype parse_dtype(const std::string& name);
bool is_complex(Dtype d);

struct ContainerContents {
  std::vector<std::size_t> shape;
  Dtype dtype = Dtype::f32;
  std::vector<double> values;  ///< complex payloads are interleaved (re, im)
};

std::string encode_container(std::span<const std::size_t> shape, std::span<const double> interleaved,
                             Dtype dtype);
ContainerContents decode_container(const std::string& bytes);

void write_container(const std::filesystem::path& path, std::span<const std::size_t> shape,
                     std::span<const double> interleaved, Dtype dtype);
ContainerContents read_container(const std::filesystem::path& path);

template <std::size_t Rank>
void save_array(const std::filesystem::path& path, const Array<Complex, Rank>& a, Dtype dtype = Dtype::c64) {
  if (!is_complex(dtype)) throw DataError("save_array: complex data needs a complex dtype");
  const auto* raw = reinterpret_cast<const double*>(a.data());
  write_container(path, a.shape(), std::span<const double>(raw, 2 * a.size()), dtype);
}

template <std::size_t Rank>
void save_array(const std::filesystem::path& path, const Array<double, Rank>& a, Dtype dtype = Dtype::f32) {
  if (is_complex(dtype)) throw DataError("save_array: real data needs a real dtype");
  write_container(path, a.shape(), a.flat(), dtype);
}

namespace detail {
template <std::size_t Rank>
typename Array<double, Rank>::Shape checked_shape(const ContainerContents& c, const std::filesystem::path& p) {
  if (c.shape.size() != Rank) {
    throw DataError(p.string() + ": expected rank " + std::to_string(Rank) + ", got " +
                    std::to_string(c.shape.size()));
  }
  typename Array<double, Rank>::Shape s{};
  for (std::size_t d = 0; d < Rank; ++d) s[d] = c.shape[d];
  return s;
}
}  // namespace detail

template <std::size_t Rank>
Array<Complex, Rank> load_complex(const std::filesystem::path& path) {
  auto c = read_container(path);
  if (!is_complex(c.dtype)) throw DataError(path.string() + ": expected complex dtype");
  Array<Complex, Rank> out(detail::checked_shape<Rank>(c, path));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(c.values[2 * i], c.values[2 * i + 1]);
  return out;
}

template <std::size_t Rank>
Array<double, Rank> load_real(const std::filesystem::path& path) {
  auto c = read_container(path);
  if (is_complex(c.dtype)) throw DataError(path.string() + ": expected real dtype");
  return Array<double, Rank>(detail::checked_shape<Rank>(c, path), std::move(c.values));
}

}  // namespace ptychotomo

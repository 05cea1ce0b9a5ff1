#include "ptychotomo/core/container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace ptychotomo {

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'P', 'T', 'V', 'F'};

std::size_t scalar_bytes(Dtype d) {
  switch (d) {
    case Dtype::f32: return 4;
    case Dtype::c64: return 8;
    case Dtype::f64: return 8;
    case Dtype::c128: return 16;
  }
  return 0;
}

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

}  // namespace

std::string dtype_name(Dtype d) {
  switch (d) {
    case Dtype::c64: return "c64";
    case Dtype::f32: return "f32";
    case Dtype::c128: return "c128";
    case Dtype::f64: return "f64";
  }
  return "?";
}

Dtype parse_dtype(const std::string& name) {
  if (name == "c64") return Dtype::c64;
  if (name == "f32") return Dtype::f32;
  if (name == "c128") return Dtype::c128;
  if (name == "f64") return Dtype::f64;
  throw DataError("unknown container dtype '" + name + "'");
}

bool is_complex(Dtype d) { return d == Dtype::c64 || d == Dtype::c128; }

std::string encode_container(std::span<const std::size_t> shape, std::span<const double> interleaved,
                             Dtype dtype) {
  const std::size_t elements =
      std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  const std::size_t scalars = elements * (is_complex(dtype) ? 2 : 1);
  if (interleaved.size() != scalars) throw DataError("encode_container: payload does not match shape");

  nlohmann::ordered_json header;
  header["shape"] = std::vector<std::size_t>(shape.begin(), shape.end());
  header["dtype"] = dtype_name(dtype);
  header["order"] = "row-major";
  const std::string text = header.dump();

  std::string out;
  out.reserve(8 + text.size() + elements * scalar_bytes(dtype));
  out.append(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  const bool single = dtype == Dtype::f32 || dtype == Dtype::c64;
  for (double v : interleaved) {
    if (single) {
      const float f = static_cast<float>(v);
      char b[4];
      std::memcpy(b, &f, 4);
      out.append(b, 4);
    } else {
      char b[8];
      std::memcpy(b, &v, 8);
      out.append(b, 8);
    }
  }
  return out;
}

ContainerContents decode_container(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError("container: bad magic");
  }
  std::uint32_t hlen = 0;
  std::memcpy(&hlen, bytes.data() + 4, 4);
  if (bytes.size() < 8 + static_cast<std::size_t>(hlen)) throw DataError("container: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(8, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("container: malformed header: ") + e.what());
  }
  ContainerContents c;
  try {
    c.shape = header.at("shape").get<std::vector<std::size_t>>();
    c.dtype = parse_dtype(header.at("dtype").get<std::string>());
    if (header.value("order", std::string("row-major")) != "row-major") {
      throw DataError("container: only row-major order is supported");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("container: header missing fields: ") + e.what());
  }
  const std::size_t elements =
      std::accumulate(c.shape.begin(), c.shape.end(), std::size_t{1}, std::multiplies<>());
  const std::size_t scalars = elements * (is_complex(c.dtype) ? 2 : 1);
  const std::size_t width = is_complex(c.dtype) ? scalar_bytes(c.dtype) / 2 : scalar_bytes(c.dtype);
  const std::size_t payload = 8 + hlen;
  if (bytes.size() != payload + scalars * width) throw DataError("container: payload size mismatch");
  c.values.resize(scalars);
  const char* p = bytes.data() + payload;
  for (std::size_t i = 0; i < scalars; ++i) {
    if (width == 4) {
      float f;
      std::memcpy(&f, p + 4 * i, 4);
      c.values[i] = f;
    } else {
      std::memcpy(&c.values[i], p + 8 * i, 8);
    }
  }
  return c;
}

void write_container(const std::filesystem::path& path, std::span<const std::size_t> shape,
                     std::span<const double> interleaved, Dtype dtype) {
  const std::string bytes = encode_container(shape, interleaved, dtype);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write failed: " + path.string());
}

ContainerContents read_container(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return decode_container(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace ptychotomo

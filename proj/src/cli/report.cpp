#include "ptychotomo/cli/report.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <memory>
#include <vector>

#include "ptychotomo/cli/dataset.hpp"
#include "ptychotomo/core/error.hpp"

namespace ptychotomo {

void write_preview_png(const std::filesystem::path& path, const Array3d& volume, double lo, double hi,
                       std::size_t columns) {
  const std::size_t nz = volume.extent(0), h = volume.extent(1), w = volume.extent(2);
  if (nz == 0 || h == 0 || w == 0) throw DataError("preview: empty volume");
  columns = std::max<std::size_t>(1, std::min(columns, nz));
  const std::size_t rows = (nz + columns - 1) / columns;
  const std::size_t gap = 1;
  const std::size_t width = columns * w + (columns - 1) * gap, height = rows * h + (rows - 1) * gap;
  std::vector<png_byte> img(width * height, 0);
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t z = 0; z < nz; ++z) {
    const std::size_t oy = (z / columns) * (h + gap), ox = (z % columns) * (w + gap);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const double t = std::clamp((volume(z, r, c) - lo) / span, 0.0, 1.0);
        img[(oy + r) * width + ox + c] = static_cast<png_byte>(std::lround(255.0 * t));
      }
    }
  }

  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw DataError("preview: cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("preview: libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("preview: libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < height; ++r) png_write_row(png, img.data() + r * width);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& inputs,
                    const nlohmann::json& config, const nlohmann::json& outputs, const std::string& started_utc) {
  nlohmann::json m;
  m["command"] = command;
  m["inputs"] = inputs;
  m["config"] = config;
  m["config_hash"] = fnv1a_hex(config.dump());
  m["outputs"] = outputs;
  m["versions"] = {{"ptychotomo", kToolVersion}, {"container", 1}, {"wire_protocol", 1}};
  m["started_utc"] = started_utc;
  m["finished_utc"] = utc_now();
  write_json_file(dir / "manifest.json", m);
}

}  // namespace ptychotomo

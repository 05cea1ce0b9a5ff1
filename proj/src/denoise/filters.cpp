#include "ptychotomo/denoise/filters.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/parallel.hpp"

namespace ptychotomo {

namespace {

// Mirror index into [0, n): -1 -> 0, n -> n-1 (half-sample symmetric).
std::size_t mirror(long i, std::size_t n) {
  const long len = static_cast<long>(n);
  if (len == 1) return 0;
  const long period = 2 * len;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < len ? i : period - 1 - i);
}

void require_slices(const Array3d& v, const char* what) {
  if (v.extent(1) == 0 || v.extent(2) == 0) throw DataError(std::string(what) + ": empty slices");
}

}  // namespace

Array3d denoise_identity(const Array3d& v) { return v; }

Array3d denoise_gaussian(const Array3d& v, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian denoiser: sigma must be > 0");
  require_slices(v, "gaussian denoiser");
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;

  const std::size_t h = v.extent(1), w = v.extent(2);
  Array3d out(v.shape());
  parallel_for(v.extent(0), [&](std::size_t m) {
    const auto src = v.slab(m);
    auto dst = out.slab(m);
    std::vector<double> tmp(h * w);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        double acc = 0.0;
        for (long t = -radius; t <= radius; ++t) acc += k[t + radius] * src[r * w + mirror(static_cast<long>(c) + t, w)];
        tmp[r * w + c] = acc;
      }
    }
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        double acc = 0.0;
        for (long t = -radius; t <= radius; ++t) acc += k[t + radius] * tmp[mirror(static_cast<long>(r) + t, h) * w + c];
        dst[r * w + c] = acc;
      }
    }
  });
  return out;
}

Array3d denoise_median(const Array3d& v, int width) {
  if (width < 1 || width % 2 == 0) throw ConfigError("median denoiser: width must be odd and >= 1");
  require_slices(v, "median denoiser");
  const long half = width / 2;
  const std::size_t h = v.extent(1), w = v.extent(2);
  Array3d out(v.shape());
  parallel_for(v.extent(0), [&](std::size_t m) {
    const auto src = v.slab(m);
    auto dst = out.slab(m);
    std::vector<double> win(static_cast<std::size_t>(width * width));
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        std::size_t n = 0;
        for (long i = -half; i <= half; ++i) {
          for (long j = -half; j <= half; ++j) {
            win[n++] = src[mirror(static_cast<long>(r) + i, h) * w + mirror(static_cast<long>(c) + j, w)];
          }
        }
        auto mid = win.begin() + static_cast<long>(n / 2);
        std::nth_element(win.begin(), mid, win.end());
        dst[r * w + c] = *mid;
      }
    }
  });
  return out;
}

Array3d denoise_tv(const Array3d& v, double weight, int iters) {
  if (!(weight > 0.0)) throw ConfigError("tv denoiser: weight must be > 0");
  if (iters < 1) throw ConfigError("tv denoiser: iterations must be >= 1");
  require_slices(v, "tv denoiser");
  constexpr double step = 0.125;
  const std::size_t h = v.extent(1), w = v.extent(2);
  Array3d out(v.shape());
  parallel_for(v.extent(0), [&](std::size_t m) {
    const auto f = v.slab(m);
    auto u = out.slab(m);
    std::vector<double> px(h * w, 0.0), py(h * w, 0.0), div(h * w, 0.0), q(h * w);
    auto divergence = [&] {
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          const std::size_t i = r * w + c;
          double d = 0.0;
          if (r + 1 < h) d += py[i];
          if (r > 0) d -= py[i - w];
          if (c + 1 < w) d += px[i];
          if (c > 0) d -= px[i - 1];
          div[i] = d;
        }
      }
    };
    for (int it = 0; it < iters; ++it) {
      divergence();
      for (std::size_t i = 0; i < h * w; ++i) q[i] = div[i] - f[i] / weight;
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          const std::size_t i = r * w + c;
          const double gx = c + 1 < w ? q[i + 1] - q[i] : 0.0;
          const double gy = r + 1 < h ? q[i + w] - q[i] : 0.0;
          const double scale = 1.0 + step * std::hypot(gx, gy);
          px[i] = (px[i] + step * gx) / scale;
          py[i] = (py[i] + step * gy) / scale;
        }
      }
    }
    divergence();
    for (std::size_t i = 0; i < h * w; ++i) u[i] = f[i] - weight * div[i];
  });
  return out;
}

}  // namespace ptychotomo

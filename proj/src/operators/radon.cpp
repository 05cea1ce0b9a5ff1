#include "ptychotomo/operators/radon.hpp"

#include <algorithm>
#include <cmath>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/parallel.hpp"

namespace ptychotomo {

RadonPlan::RadonPlan(std::size_t nz, std::size_t n, std::vector<double> angles)
    : nz_(nz), n_(n), angles_(std::move(angles)) {
  if (nz_ < 1 || n_ < 2) throw ConfigError("RadonPlan: need Nz >= 1 and N >= 2");
  if (angles_.empty()) throw ConfigError("RadonPlan: no angles");
  const double c = 0.5 * static_cast<double>(n_ - 1);
  const auto ni = static_cast<long>(n_);
  ray_begin_.reserve(angles_.size() * n_ + 1);
  ray_begin_.push_back(0);
  std::vector<Tap> ray;
  for (double theta : angles_) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    for (std::size_t u = 0; u < n_; ++u) {
      ray.clear();
      const double du = static_cast<double>(u) - c;
      for (std::size_t t = 0; t < n_; ++t) {
        const double dt = static_cast<double>(t) - c;
        const double col = c + du * ct - dt * st;
        const double row = c + du * st + dt * ct;
        const double r0 = std::floor(row);
        const double c0 = std::floor(col);
        const double fr = row - r0;
        const double fc = col - c0;
        const long i0 = static_cast<long>(r0);
        const long j0 = static_cast<long>(c0);
        const double w[4] = {(1 - fr) * (1 - fc), (1 - fr) * fc, fr * (1 - fc), fr * fc};
        const long ii[4] = {i0, i0, i0 + 1, i0 + 1};
        const long jj[4] = {j0, j0 + 1, j0, j0 + 1};
        for (int k = 0; k < 4; ++k) {
          if (w[k] == 0.0 || ii[k] < 0 || jj[k] < 0 || ii[k] >= ni || jj[k] >= ni) continue;
          ray.push_back({static_cast<std::uint32_t>(ii[k] * ni + jj[k]), w[k]});
        }
      }
      // merge duplicate pixels so each ray touches a pixel once
      std::sort(ray.begin(), ray.end(), [](const Tap& a, const Tap& b) { return a.pixel < b.pixel; });
      std::size_t out = 0;
      for (std::size_t k = 0; k < ray.size(); ++k) {
        if (out > 0 && ray[out - 1].pixel == ray[k].pixel) {
          ray[out - 1].weight += ray[k].weight;
        } else {
          ray[out++] = ray[k];
        }
      }
      taps_.insert(taps_.end(), ray.begin(), ray.begin() + static_cast<long>(out));
      ray_begin_.push_back(taps_.size());
    }
  }
}

namespace {
template <std::size_t Rank>
void require_shape(const std::array<std::size_t, Rank>& got, const std::array<std::size_t, Rank>& want,
                   const char* what) {
  if (got != want) {
    throw DataError(std::string(what) + ": expected shape " + shape_string(want) + ", got " +
                    shape_string(got));
  }
}
}  // namespace

template <typename T>
Array<T, 3> radon_forward(const Array<T, 3>& x, const RadonPlan& plan) {
  const std::size_t nz = plan.nz(), n = plan.n(), na = plan.n_angles();
  require_shape(x.shape(), {nz, n, n}, "radon_forward");
  Array<T, 3> p({na, nz, n});
  parallel_for(nz, [&](std::size_t z) {
    const T* slice = x.data() + z * n * n;
    for (std::size_t a = 0; a < na; ++a) {
      T* row = p.data() + (a * nz + z) * n;
      for (std::size_t u = 0; u < n; ++u) {
        T acc{};
        for (const auto& tap : plan.ray(a, u)) acc += tap.weight * slice[tap.pixel];
        row[u] = acc;
      }
    }
  });
  return p;
}

template <typename T>
Array<T, 3> radon_adjoint(const Array<T, 3>& p, const RadonPlan& plan) {
  const std::size_t nz = plan.nz(), n = plan.n(), na = plan.n_angles();
  require_shape(p.shape(), {na, nz, n}, "radon_adjoint");
  Array<T, 3> x({nz, n, n});
  parallel_for(nz, [&](std::size_t z) {
    T* slice = x.data() + z * n * n;
    for (std::size_t a = 0; a < na; ++a) {
      const T* row = p.data() + (a * nz + z) * n;
      for (std::size_t u = 0; u < n; ++u) {
        const T v = row[u];
        for (const auto& tap : plan.ray(a, u)) slice[tap.pixel] += tap.weight * v;
      }
    }
  });
  return x;
}

template Array<double, 3> radon_forward(const Array<double, 3>&, const RadonPlan&);
template Array<Complex, 3> radon_forward(const Array<Complex, 3>&, const RadonPlan&);
template Array<double, 3> radon_adjoint(const Array<double, 3>&, const RadonPlan&);
template Array<Complex, 3> radon_adjoint(const Array<Complex, 3>&, const RadonPlan&);

Array3c transmission(const Array3c& x, const RadonPlan& plan, double wavenumber) {
  Array3c psi = radon_forward(x, plan);
  const Complex ic(0.0, wavenumber);
  for (auto& v : psi) v = std::exp(ic * v);
  return psi;
}

std::vector<double> disk_support(std::size_t n, double radius) {
  std::vector<double> m(n * n, 0.0);
  const double c = (static_cast<double>(n) - 1.0) / 2.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t col = 0; col < n; ++col) {
      if (std::hypot(static_cast<double>(r) - c, static_cast<double>(col) - c) <= radius) m[r * n + col] = 1.0;
    }
  }
  return m;
}

}  // namespace ptychotomo

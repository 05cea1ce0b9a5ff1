#include "ptychotomo/operators/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "ptychotomo/core/error.hpp"

namespace ptychotomo {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// For even n, fftshift(fft(ifftshift(a))) equals fft applied between two checkerboard
// sign flips: the (-1)^(n/2) phase factors of the two axes cancel.
void checkerboard(std::span<Complex> frame, std::size_t n, double scale) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double s = ((i + j) & 1U) ? -scale : scale;
      frame[i * n + j] *= s;
    }
  }
}
}  // namespace

struct CenteredFft2::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

CenteredFft2::CenteredFft2(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2 || n % 2 != 0) throw ConfigError("CenteredFft2: frame size must be even and >= 2");
  std::vector<Complex> scratch(n * n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  const int ni = static_cast<int>(n);
  plans_->forward = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_BACKWARD, flags);
}

CenteredFft2::~CenteredFft2() {
  if (!plans_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

CenteredFft2::CenteredFft2(CenteredFft2&&) noexcept = default;
CenteredFft2& CenteredFft2::operator=(CenteredFft2&&) noexcept = default;

void CenteredFft2::forward(std::span<Complex> frame) const {
  checkerboard(frame, n_, 1.0);
  auto* p = reinterpret_cast<fftw_complex*>(frame.data());
  fftw_execute_dft(plans_->forward, p, p);
  checkerboard(frame, n_, 1.0 / static_cast<double>(n_));
}

void CenteredFft2::inverse(std::span<Complex> frame) const {
  checkerboard(frame, n_, 1.0);
  auto* p = reinterpret_cast<fftw_complex*>(frame.data());
  fftw_execute_dft(plans_->backward, p, p);
  checkerboard(frame, n_, 1.0 / static_cast<double>(n_));
}

}  // namespace ptychotomo

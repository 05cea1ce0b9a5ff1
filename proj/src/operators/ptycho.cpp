#include "ptychotomo/operators/ptycho.hpp"

#include <algorithm>
#include <vector>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/parallel.hpp"

namespace ptychotomo {

PtychoOperator::PtychoOperator(ExperimentGeometry geom)
    : geom_(std::move(geom)),
      np_(geom_.probe_size()),
      nd_(geom_.detector_size),
      pad_((geom_.detector_size - geom_.probe_size()) / 2),
      fft_(geom_.detector_size) {
  geom_.validate();
}

void PtychoOperator::forward_angle(std::size_t angle, std::span<const Complex> psi_slab,
                                   std::span<Complex> frames) const {
  const std::size_t n = geom_.n;
  const auto& positions = geom_.scan_positions.at(angle);
  const std::size_t fs = frame_size();
  for (std::size_t s = 0; s < positions.size(); ++s) {
    auto frame = frames.subspan(s * fs, fs);
    std::fill(frame.begin(), frame.end(), Complex{});
    const auto [r0, c0] = positions[s];
    for (std::size_t i = 0; i < np_; ++i) {
      const Complex* src = psi_slab.data() + (static_cast<std::size_t>(r0) + i) * n + static_cast<std::size_t>(c0);
      Complex* dst = frame.data() + (pad_ + i) * nd_ + pad_;
      const Complex* probe = geom_.probe.data() + i * np_;
      for (std::size_t j = 0; j < np_; ++j) dst[j] = probe[j] * src[j];
    }
    fft_.forward(frame);
  }
}

void PtychoOperator::adjoint_angle(std::size_t angle, std::span<const Complex> frames,
                                   std::span<Complex> psi_slab) const {
  const std::size_t n = geom_.n;
  const auto& positions = geom_.scan_positions.at(angle);
  const std::size_t fs = frame_size();
  std::fill(psi_slab.begin(), psi_slab.end(), Complex{});
  std::vector<Complex> scratch(fs);
  for (std::size_t s = 0; s < positions.size(); ++s) {
    const auto frame = frames.subspan(s * fs, fs);
    std::copy(frame.begin(), frame.end(), scratch.begin());
    fft_.inverse(scratch);
    const auto [r0, c0] = positions[s];
    for (std::size_t i = 0; i < np_; ++i) {
      Complex* dst = psi_slab.data() + (static_cast<std::size_t>(r0) + i) * n + static_cast<std::size_t>(c0);
      const Complex* src = scratch.data() + (pad_ + i) * nd_ + pad_;
      const Complex* probe = geom_.probe.data() + i * np_;
      for (std::size_t j = 0; j < np_; ++j) dst[j] += std::conj(probe[j]) * src[j];
    }
  }
}

Array4c PtychoOperator::forward(const Array3c& psi) const {
  const std::array<std::size_t, 3> want{geom_.n_angles(), geom_.nz, geom_.n};
  if (psi.shape() != want) {
    throw DataError("ptycho_forward: psi shape " + shape_string(psi.shape()) + " does not match geometry " +
                    shape_string(want));
  }
  Array4c out({geom_.n_angles(), geom_.scans_per_angle(), nd_, nd_});
  parallel_for(geom_.n_angles(), [&](std::size_t a) { forward_angle(a, psi.slab(a), out.slab(a)); });
  return out;
}

Array3c PtychoOperator::adjoint(const Array4c& frames) const {
  const std::array<std::size_t, 4> want{geom_.n_angles(), geom_.scans_per_angle(), nd_, nd_};
  if (frames.shape() != want) {
    throw DataError("ptycho_adjoint: data shape " + shape_string(frames.shape()) + " does not match geometry " +
                    shape_string(want));
  }
  Array3c out({geom_.n_angles(), geom_.nz, geom_.n});
  parallel_for(geom_.n_angles(), [&](std::size_t a) { adjoint_angle(a, frames.slab(a), out.slab(a)); });
  return out;
}

Array4c ptycho_forward(const Array3c& psi, const ExperimentGeometry& geom) {
  return PtychoOperator(geom).forward(psi);
}

Array3c ptycho_adjoint(const Array4c& frames, const ExperimentGeometry& geom) {
  return PtychoOperator(geom).adjoint(frames);
}

}  // namespace ptychotomo

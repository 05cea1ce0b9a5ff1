#include "ptychotomo/solvers/ptycho_subproblem.hpp"

#include <cmath>
#include <memory>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/parallel.hpp"
#include "ptychotomo/core/vector_ops.hpp"

namespace ptychotomo {

namespace {
constexpr double kFloorSq = kLogFloor * kLogFloor;
const double kLogOfFloor = std::log(kLogFloor);

void check_shapes(const Array3c& psi, const Array4d& d, const Array3c& hx, const Array3c& lambda,
                  const PtychoOperator& op) {
  const auto& g = op.geometry();
  const std::array<std::size_t, 3> s3{g.n_angles(), g.nz, g.n};
  const std::array<std::size_t, 4> s4{g.n_angles(), g.scans_per_angle(), g.detector_size, g.detector_size};
  if (psi.shape() != s3 || hx.shape() != s3 || lambda.shape() != s3) {
    throw DataError("ptycho subproblem: psi/hx/lambda must have shape " + shape_string(s3));
  }
  if (d.shape() != s4) throw DataError("ptycho subproblem: data must have shape " + shape_string(s4));
}
}  // namespace

double poisson_data_term(std::span<const Complex> u, std::span<const double> d, std::size_t* clamped) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double a = std::norm(u[j]);
    acc += a;
    if (d[j] > 0.0) {
      if (a < kFloorSq) {
        acc -= 2.0 * d[j] * kLogOfFloor;
        ++count;
      } else {
        acc -= d[j] * std::log(a);  // 2 d log|u| = d log|u|^2
      }
    }
  }
  if (clamped) *clamped += count;
  return acc;
}

PtychoAngleProblem::PtychoAngleProblem(const PtychoOperator& op, std::size_t angle, std::span<const double> d,
                                       std::span<const Complex> hx, std::span<const Complex> lambda, double rho)
    : op_(op), angle_(angle), d_(d), target_(hx.begin(), hx.end()), rho_(rho), far_(op.frames_per_angle_size()) {
  if (rho > 0.0) {
    for (std::size_t i = 0; i < target_.size(); ++i) target_[i] += lambda[i] / rho;
  }
}

double PtychoAngleProblem::penalty(std::span<const Complex> psi) const {
  if (rho_ == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) acc += std::norm(target_[i] - psi[i]);
  return rho_ * acc;
}

double PtychoAngleProblem::value(std::span<const Complex> psi) {
  op_.forward_angle(angle_, psi, far_);
  return poisson_data_term(far_, d_, &clamped_) + penalty(psi);
}

double PtychoAngleProblem::value_and_gradient(std::span<const Complex> psi, std::span<Complex> g) {
  op_.forward_angle(angle_, psi, far_);
  const double f = poisson_data_term(far_, d_, &clamped_) + penalty(psi);
  // residual u - d / conj(u) = u (1 - d / |u|^2)
  for (std::size_t j = 0; j < far_.size(); ++j) {
    const double a = std::norm(far_[j]);
    if (d_[j] > 0.0 && a >= kFloorSq) far_[j] *= 1.0 - d_[j] / a;
  }
  op_.adjoint_angle(angle_, far_, g);
  if (rho_ != 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= rho_ * (target_[i] - psi[i]);
  }
  return f;
}

std::function<double(double)> PtychoAngleProblem::line(std::span<const Complex> psi, std::span<const Complex> dir) {
  // G is linear: G(psi + t dir) = u + t v; the penalty is a quadratic in t.
  struct Cache {
    std::vector<Complex> u, v, trial;
    double a = 0.0, b = 0.0, c = 0.0;
  };
  auto cache = std::make_shared<Cache>();
  cache->u.resize(far_.size());
  cache->v.resize(far_.size());
  cache->trial.resize(far_.size());
  op_.forward_angle(angle_, psi, cache->u);
  op_.forward_angle(angle_, dir, cache->v);
  if (rho_ != 0.0) {
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const Complex e = target_[i] - psi[i];
      cache->a += std::norm(e);
      cache->b += e.real() * dir[i].real() + e.imag() * dir[i].imag();
      cache->c += std::norm(dir[i]);
    }
  }
  return [this, cache](double t) {
    auto& c = *cache;
    for (std::size_t j = 0; j < c.u.size(); ++j) c.trial[j] = c.u[j] + t * c.v[j];
    return poisson_data_term(c.trial, d_, &clamped_) + rho_ * (c.a - 2.0 * t * c.b + t * t * c.c);
  };
}

double ptycho_objective(const Array3c& psi, const Array4d& d, const Array3c& hx, const Array3c& lambda, double rho,
                        const PtychoOperator& op, std::size_t* clamped) {
  check_shapes(psi, d, hx, lambda, op);
  const std::size_t na = psi.extent(0);
  std::vector<double> parts(na);
  std::vector<std::size_t> counts(na);
  parallel_for(na, [&](std::size_t a) {
    PtychoAngleProblem p(op, a, d.slab(a), hx.slab(a), lambda.slab(a), rho);
    parts[a] = p.value(psi.slab(a));
    counts[a] = p.clamped();
  });
  double total = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    total += parts[a];
    if (clamped) *clamped += counts[a];
  }
  return total;
}

Array3c ptycho_gradient(const Array3c& psi, const Array4d& d, const Array3c& hx, const Array3c& lambda, double rho,
                        const PtychoOperator& op, std::size_t* clamped) {
  check_shapes(psi, d, hx, lambda, op);
  const std::size_t na = psi.extent(0);
  Array3c g(psi.shape());
  std::vector<std::size_t> counts(na);
  parallel_for(na, [&](std::size_t a) {
    PtychoAngleProblem p(op, a, d.slab(a), hx.slab(a), lambda.slab(a), rho);
    p.value_and_gradient(psi.slab(a), g.slab(a));
    counts[a] = p.clamped();
  });
  if (clamped) {
    for (auto c : counts) *clamped += c;
  }
  return g;
}

}  // namespace ptychotomo

#include "ptychotomo/solvers/tomo_subproblem.hpp"

#include <numbers>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/vector_ops.hpp"

namespace ptychotomo {

TomoProblem::TomoProblem(const RadonPlan& plan, const Array3c& zeta, const Array3c& psi_hat, const Array3c& eta,
                         const Array3c& mu, double rho, double tau, double nu, std::span<const double> support)
    : plan_(plan),
      zeta_(zeta),
      weight_(psi_hat.shape()),
      centre_(eta.shape()),
      rho_(rho),
      tau_(tau),
      support_(support) {
  const std::array<std::size_t, 3> proj{plan.n_angles(), plan.nz(), plan.n()};
  const std::array<std::size_t, 3> vol{plan.nz(), plan.n(), plan.n()};
  if (zeta.shape() != proj || psi_hat.shape() != proj) {
    throw DataError("tomo subproblem: zeta and psi_hat must have shape " + shape_string(proj));
  }
  if (eta.shape() != vol || mu.shape() != vol) {
    throw DataError("tomo subproblem: eta and mu must have shape " + shape_string(vol));
  }
  if (!support.empty() && support.size() != plan.n() * plan.n()) {
    throw DataError("tomo subproblem: support must have N * N entries");
  }
  const Complex factor(0.0, 2.0 * std::numbers::pi / nu);
  for (std::size_t i = 0; i < weight_.size(); ++i) weight_[i] = factor * psi_hat[i];
  if (tau > 0.0) {
    for (std::size_t i = 0; i < centre_.size(); ++i) centre_[i] = eta[i] - mu[i] / tau;
  }
}

Array3c TomoProblem::apply_kr(std::span<const Complex> v) const {
  Array3c vol({plan_.nz(), plan_.n(), plan_.n()});
  std::copy(v.begin(), v.end(), vol.begin());
  Array3c r = radon_forward(vol, plan_);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] *= weight_[i];
  return r;
}

double TomoProblem::value(std::span<const Complex> x) {
  const Array3c kr = apply_kr(x);
  double fit = 0.0;
  for (std::size_t i = 0; i < kr.size(); ++i) fit += std::norm(kr[i] - zeta_[i]);
  double prox = 0.0;
  if (tau_ > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) prox += std::norm(x[i] - centre_[i]);
  }
  return rho_ * fit + tau_ * prox;
}

double TomoProblem::value_and_gradient(std::span<const Complex> x, std::span<Complex> g) {
  Array3c res = apply_kr(x);
  double fit = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    res[i] -= zeta_[i];
    fit += std::norm(res[i]);
    res[i] = std::conj(weight_[i]) * res[i];
  }
  const Array3c back = radon_adjoint(res, plan_);
  double prox = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    g[i] = rho_ * back[i];
    if (tau_ > 0.0) {
      const Complex e = x[i] - centre_[i];
      prox += std::norm(e);
      g[i] += tau_ * e;
    }
  }
  if (!support_.empty()) {
    const std::size_t slice = support_.size();
    for (std::size_t i = 0; i < x.size(); ++i) g[i] *= support_[i % slice];
  }
  return rho_ * fit + tau_ * prox;
}

std::function<double(double)> TomoProblem::line(std::span<const Complex> x, std::span<const Complex> dir) {
  // F(x + t d) = rho ||a + t w||^2 + tau ||e + t d||^2 with a = KRx - zeta, w = KRd, e = x - centre
  const Array3c a = apply_kr(x);
  const Array3c w = apply_kr(dir);
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex r = a[i] - zeta_[i];
    q0 += rho_ * std::norm(r);
    q1 += 2.0 * rho_ * (r.real() * w[i].real() + r.imag() * w[i].imag());
    q2 += rho_ * std::norm(w[i]);
  }
  if (tau_ > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Complex e = x[i] - centre_[i];
      q0 += tau_ * std::norm(e);
      q1 += 2.0 * tau_ * (e.real() * dir[i].real() + e.imag() * dir[i].imag());
      q2 += tau_ * std::norm(dir[i]);
    }
  }
  return [q0, q1, q2](double t) { return q0 + t * (q1 + t * q2); };
}

double tomo_objective(const Array3c& x, const Array3c& zeta, const Array3c& psi_hat, const Array3c& eta,
                      const Array3c& mu, double rho, double tau, double nu, const RadonPlan& plan) {
  TomoProblem p(plan, zeta, psi_hat, eta, mu, rho, tau, nu);
  return p.value(x.flat());
}

Array3c tomo_gradient(const Array3c& x, const Array3c& zeta, const Array3c& psi_hat, const Array3c& eta,
                      const Array3c& mu, double rho, double tau, double nu, const RadonPlan& plan) {
  TomoProblem p(plan, zeta, psi_hat, eta, mu, rho, tau, nu);
  Array3c g(x.shape());
  p.value_and_gradient(x.flat(), g.flat());
  return g;
}

}  // namespace ptychotomo

#pragma once

#include "ptychotomo/core/array.hpp"
#include "ptychotomo/operators/radon.hpp"
#include "ptychotomo/solvers/cg.hpp"

namespace ptychotomo {

/// Linearized x-subproblem
///   F(x) = rho ||K R x - zeta||^2 + tau ||x - eta + mu / tau||^2,   K = (2 pi i / nu) psi_hat.
/// tau == 0 drops the second term. The objective is quadratic, so line() is exact and cheap.
/// A non-empty `support` (N * N per slice, 0 or 1) zeroes the gradient outside it, so CG started
/// inside the support stays there.
class TomoProblem final : public CgProblem {
 public:
  TomoProblem(const RadonPlan& plan, const Array3c& zeta, const Array3c& psi_hat, const Array3c& eta,
              const Array3c& mu, double rho, double tau, double nu, std::span<const double> support = {});

  double value(std::span<const Complex> x) override;
  double value_and_gradient(std::span<const Complex> x, std::span<Complex> g) override;
  std::function<double(double)> line(std::span<const Complex> x, std::span<const Complex> dir) override;

 private:
  /// K R v for a volume v.
  Array3c apply_kr(std::span<const Complex> v) const;

  const RadonPlan& plan_;
  const Array3c& zeta_;
  Array3c weight_;  ///< (2 pi i / nu) psi_hat
  Array3c centre_;  ///< eta - mu / tau
  double rho_;
  double tau_;
  std::span<const double> support_;
};

double tomo_objective(const Array3c& x, const Array3c& zeta, const Array3c& psi_hat, const Array3c& eta,
                      const Array3c& mu, double rho, double tau, double nu, const RadonPlan& plan);

/// rho R^T K^H (K R x - zeta) + tau (x - eta + mu / tau)
Array3c tomo_gradient(const Array3c& x, const Array3c& zeta, const Array3c& psi_hat, const Array3c& eta,
                      const Array3c& mu, double rho, double tau, double nu, const RadonPlan& plan);

}  // namespace ptychotomo

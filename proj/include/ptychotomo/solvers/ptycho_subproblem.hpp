#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ptychotomo/core/array.hpp"
#include "ptychotomo/operators/ptycho.hpp"
#include "ptychotomo/solvers/cg.hpp"

namespace ptychotomo {

/// Intensities below this modulus use log(kLogFloor) and drop the d / conj(G psi) term.
inline constexpr double kLogFloor = 1e-12;

/// The psi-subproblem restricted to one angle:
///   F(psi) = sum_j (|G psi|_j^2 - 2 d_j log|G psi|_j) + rho * ||t - psi||^2,  t = H x + lambda / rho.
/// Pixels with d_j == 0 contribute |G psi|_j^2 only.
class PtychoAngleProblem final : public CgProblem {
 public:
  /// d: (Nscan, Nd, Nd) counts for this angle; hx, lambda: (Nz, N) slabs.
  PtychoAngleProblem(const PtychoOperator& op, std::size_t angle, std::span<const double> d,
                     std::span<const Complex> hx, std::span<const Complex> lambda, double rho);

  double value(std::span<const Complex> psi) override;
  double value_and_gradient(std::span<const Complex> psi, std::span<Complex> g) override;
  std::function<double(double)> line(std::span<const Complex> psi, std::span<const Complex> dir) override;

  /// Number of clamped log evaluations so far.
  std::size_t clamped() const noexcept { return clamped_; }

 private:
  double penalty(std::span<const Complex> psi) const;

  const PtychoOperator& op_;
  std::size_t angle_;
  std::span<const double> d_;
  std::vector<Complex> target_;
  double rho_;
  std::vector<Complex> far_;
  std::size_t clamped_ = 0;
};

/// sum_j (|u_j|^2 - 2 d_j log|u_j|) with the log clamp; adds clamp events to *clamped.
double poisson_data_term(std::span<const Complex> u, std::span<const double> d, std::size_t* clamped);

/// Total objective over all angles. psi, hx, lambda: (Ntheta, Nz, N); d: (Ntheta, Nscan, Nd, Nd).
double ptycho_objective(const Array3c& psi, const Array4d& d, const Array3c& hx, const Array3c& lambda, double rho,
                        const PtychoOperator& op, std::size_t* clamped = nullptr);

/// G^H (G psi - d / conj(G psi)) - rho (H x - psi + lambda / rho), all angles.
Array3c ptycho_gradient(const Array3c& psi, const Array4d& d, const Array3c& hx, const Array3c& lambda, double rho,
                        const PtychoOperator& op, std::size_t* clamped = nullptr);

}  // namespace ptychotomo

#include "ptychotomo/operators/linearization.hpp"

#include <cmath>
#include <numbers>

#include "ptychotomo/core/error.hpp"

namespace ptychotomo {

namespace {
void require_same(const Array3c& a, const Array3c& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DataError(std::string(what) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                    shape_string(b.shape()));
  }
}
}  // namespace

Array3c k_operator(const Array3c& rx, const Array3c& psi_hat, double nu) {
  require_same(rx, psi_hat, "k_operator");
  const Complex factor(0.0, 2.0 * std::numbers::pi / nu);
  Array3c out(rx.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * psi_hat[i] * rx[i];
  return out;
}

Array3c k_operator_adjoint(const Array3c& y, const Array3c& psi_hat, double nu) {
  require_same(y, psi_hat, "k_operator_adjoint");
  const Complex factor(0.0, 2.0 * std::numbers::pi / nu);
  Array3c out(y.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::conj(factor * psi_hat[i]) * y[i];
  return out;
}

Array3c zeta_term(const Array3c& psi_hat, std::size_t* floored) {
  Array3c out(psi_hat.shape());
  std::size_t count = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Complex w = psi_hat[i];
    if (std::abs(w) < kZetaFloor) {
      out[i] = Complex{};
      ++count;
    } else {
      out[i] = w * std::log(w);
    }
  }
  if (floored) *floored += count;
  return out;
}

}  // namespace ptychotomo

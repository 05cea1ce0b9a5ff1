#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ptychotomo/core/array.hpp"

namespace ptychotomo {

/// A real-valued objective of a complex vector. Gradients are taken with respect to conj(x),
/// so the directional derivative along d is 2 Re<g, d> and -g is a descent direction.
class CgProblem {
 public:
  virtual ~CgProblem() = default;

  virtual double value(std::span<const Complex> x) = 0;
  /// Writes the gradient at x into g and returns the objective at x.
  virtual double value_and_gradient(std::span<const Complex> x, std::span<Complex> g) = 0;
  /// The objective along t -> x + t * dir. The default evaluates value() on a trial point;
  /// problems with a cheap restriction (quadratics, cached linear maps) override it.
  virtual std::function<double(double)> line(std::span<const Complex> x, std::span<const Complex> dir);
};

/// Wraps a separate objective and gradient pair.
class FunctionProblem final : public CgProblem {
 public:
  using Objective = std::function<double(std::span<const Complex>)>;
  using Gradient = std::function<void(std::span<const Complex>, std::span<Complex>)>;

  FunctionProblem(Objective f, Gradient g) : f_(std::move(f)), g_(std::move(g)) {}
  double value(std::span<const Complex> x) override { return f_(x); }
  double value_and_gradient(std::span<const Complex> x, std::span<Complex> g) override {
    g_(x, g);
    return f_(x);
  }

 private:
  Objective f_;
  Gradient g_;
};

struct CgOptions {
  int iters = 4;
  double armijo_c1 = 1e-4;
  double step_shrink = 0.5;
  double initial_step = 1.0;
  int max_halvings = 20;
  std::string stage = "cg";  ///< named in abort diagnostics
};

struct CgState {
  std::vector<Complex> direction;  ///< xi_m after the last iteration
  std::vector<Complex> gradient;   ///< gradient at the final iterate
  double step = 0.0;               ///< last accepted step
  std::vector<double> objective;   ///< value at init and after every iteration
  int resets = 0;                  ///< steepest-descent restarts
  int failed_searches = 0;         ///< line searches that took a zero step
};

/// Nonlinear CG with Dai-Yuan directions and Armijo backtracking. Runs exactly opts.iters
/// iterations, updating x in place. Throws SolverAbort on a non-finite gradient or objective.
CgState cg_minimize(CgProblem& problem, std::span<Complex> x, const CgOptions& opts);

CgState cg_minimize(const FunctionProblem::Objective& objective, const FunctionProblem::Gradient& gradient,
                    std::span<Complex> x, const CgOptions& opts);

}  // namespace ptychotomo

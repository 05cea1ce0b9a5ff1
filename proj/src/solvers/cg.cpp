#include "ptychotomo/solvers/cg.hpp"

#include <cmath>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/vector_ops.hpp"

namespace ptychotomo {

std::function<double(double)> CgProblem::line(std::span<const Complex> x, std::span<const Complex> dir) {
  return [this, x, dir, trial = std::vector<Complex>(x.size())](double t) mutable {
    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + t * dir[i];
    return value(trial);
  };
}

namespace {
void require_finite(double f, std::span<const Complex> g, const std::string& stage) {
  if (!std::isfinite(f)) throw SolverAbort(stage + ": objective is not finite");
  if (!all_finite(g)) throw SolverAbort(stage + ": gradient is not finite");
}
}  // namespace

CgState cg_minimize(CgProblem& problem, std::span<Complex> x, const CgOptions& opts) {
  if (opts.iters < 1) throw ConfigError(opts.stage + ": cg iterations must be >= 1");
  const std::size_t n = x.size();
  CgState st;
  st.gradient.resize(n);
  st.direction.resize(n);
  std::vector<Complex> g_new(n);

  double f = problem.value_and_gradient(x, st.gradient);
  require_finite(f, st.gradient, opts.stage);
  st.objective.push_back(f);
  for (std::size_t i = 0; i < n; ++i) st.direction[i] = -st.gradient[i];

  for (int m = 0; m < opts.iters; ++m) {
    double slope = 2.0 * real_dot(st.gradient, st.direction);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) st.direction[i] = -st.gradient[i];
      slope = -2.0 * norm_sq(st.gradient);
      ++st.resets;
    }
    if (slope == 0.0) {  // stationary: nothing to do for the remaining iterations
      st.objective.push_back(f);
      continue;
    }

    auto phi = problem.line(x, st.direction);
    double step = opts.initial_step;
    double f_trial = 0.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      f_trial = phi(step);
      if (std::isfinite(f_trial) && f_trial <= f + opts.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= opts.step_shrink;
    }
    if (!accepted) {
      ++st.failed_searches;
      ++st.resets;
      st.step = 0.0;
      for (std::size_t i = 0; i < n; ++i) st.direction[i] = -st.gradient[i];
      st.objective.push_back(f);
      continue;
    }

    axpy(step, st.direction, x);
    st.step = step;
    f = problem.value_and_gradient(x, g_new);
    require_finite(f, g_new, opts.stage);
    st.objective.push_back(f);

    // Dai-Yuan: beta = |g+|^2 / Re(y^H xi), y = g+ - g
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex y = g_new[i] - st.gradient[i];
      denom += y.real() * st.direction[i].real() + y.imag() * st.direction[i].imag();
    }
    if (std::abs(denom) < 1e-30) {
      for (std::size_t i = 0; i < n; ++i) st.direction[i] = -g_new[i];
      ++st.resets;
    } else {
      const double beta = norm_sq(g_new) / denom;
      for (std::size_t i = 0; i < n; ++i) st.direction[i] = -g_new[i] + beta * st.direction[i];
    }
    st.gradient.swap(g_new);
  }
  return st;
}

CgState cg_minimize(const FunctionProblem::Objective& objective, const FunctionProblem::Gradient& gradient,
                    std::span<Complex> x, const CgOptions& opts) {
  FunctionProblem p(objective, gradient);
  return cg_minimize(p, x, opts);
}

}  // namespace ptychotomo

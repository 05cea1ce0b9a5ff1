#pragma once

#include <string>
#include <vector>

namespace ptychotomo {

/// Per-iteration PnP weight alpha(k) over a horizon of K outer iterations.
///
/// Selectors (missing trailing parameters take the defaults shown):
///   constant:v                      alpha = v
///   linear_ramp:start=0:end=1       linear from start at k = 0 to end at k = K-1
///   step:low=0:high=1:at=0.5        low before k = at*K, high from there on
///   ramp_hold:end=1:fraction=0.5    linear from 0 to end over the first fraction*K iterations, then end
///   oscillate:low=0:high=1:period=10  square wave, high for the first half of every period
///   incremental_final:cap=0.1       min(k/K, cap), and exactly 1 at k = K-1
class AlphaSchedule {
 public:
  enum class Kind { constant, linear_ramp, step, ramp_hold, oscillate, incremental_final };

  AlphaSchedule(Kind kind, std::vector<double> params, int horizon);

  /// Throws ConfigError on an unknown kind or out-of-range parameters.
  static AlphaSchedule parse(const std::string& selector, int horizon);

  Kind kind() const noexcept { return kind_; }
  int horizon() const noexcept { return horizon_; }
  const std::vector<double>& params() const noexcept { return params_; }
  /// Canonical selector with every parameter spelled out.
  std::string selector() const;

  /// alpha(k) in [0, 1]. Throws ConfigError for k outside [0, K).
  double value(int k) const;

 private:
  Kind kind_;
  std::vector<double> params_;
  int horizon_;
};

double alpha_value(const AlphaSchedule& schedule, int k);

/// The six study schedules, in report order: constant:1, constant low, linear ramp, step,
/// oscillate and incremental_final.
std::vector<std::string> study_schedules();

}  // namespace ptychotomo

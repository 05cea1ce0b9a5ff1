#include "ptychotomo/denoise/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ptychotomo/core/error.hpp"

namespace ptychotomo {

namespace {

struct KindInfo {
  AlphaSchedule::Kind kind;
  const char* name;
  std::vector<double> defaults;
};

const std::vector<KindInfo>& kinds() {
  static const std::vector<KindInfo> table = {
      {AlphaSchedule::Kind::constant, "constant", {0.0}},
      {AlphaSchedule::Kind::linear_ramp, "linear_ramp", {0.0, 1.0}},
      {AlphaSchedule::Kind::step, "step", {0.0, 1.0, 0.5}},
      {AlphaSchedule::Kind::ramp_hold, "ramp_hold", {1.0, 0.5}},
      {AlphaSchedule::Kind::oscillate, "oscillate", {0.0, 1.0, 10.0}},
      {AlphaSchedule::Kind::incremental_final, "incremental_final", {0.1}},
  };
  return table;
}

const KindInfo& info(AlphaSchedule::Kind k) {
  for (const auto& i : kinds()) {
    if (i.kind == k) return i;
  }
  throw ConfigError("alpha schedule: unknown kind");
}

double parse_number(const std::string& s, const std::string& selector) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("alpha schedule '" + selector + "': bad number '" + s + "'");
  }
  return v;
}

bool unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

AlphaSchedule::AlphaSchedule(Kind kind, std::vector<double> params, int horizon)
    : kind_(kind), params_(std::move(params)), horizon_(horizon) {
  const auto& def = info(kind).defaults;
  if (params_.size() > def.size()) throw ConfigError(selector() + ": too many parameters");
  for (std::size_t i = params_.size(); i < def.size(); ++i) params_.push_back(def[i]);
  if (horizon_ < 0) throw ConfigError("alpha schedule: horizon must be >= 0");
  const auto& p = params_;
  bool ok = true;
  switch (kind_) {
    case Kind::constant: ok = unit(p[0]); break;
    case Kind::linear_ramp: ok = unit(p[0]) && unit(p[1]); break;
    case Kind::step: ok = unit(p[0]) && unit(p[1]) && unit(p[2]); break;
    case Kind::ramp_hold: ok = unit(p[0]) && p[1] > 0.0 && p[1] <= 1.0; break;
    case Kind::oscillate: ok = unit(p[0]) && unit(p[1]) && p[2] >= 2.0 && std::floor(p[2]) == p[2]; break;
    case Kind::incremental_final: ok = unit(p[0]); break;
  }
  if (!ok) throw ConfigError("alpha schedule '" + selector() + "': parameter out of range");
}

AlphaSchedule AlphaSchedule::parse(const std::string& selector, int horizon) {
  std::vector<std::string> parts;
  std::stringstream ss(selector);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw ConfigError("alpha schedule: empty selector");
  for (const auto& i : kinds()) {
    if (parts[0] != i.name) continue;
    std::vector<double> params;
    for (std::size_t k = 1; k < parts.size(); ++k) params.push_back(parse_number(parts[k], selector));
    if (i.kind == Kind::constant && params.empty()) {
      throw ConfigError("alpha schedule '" + selector + "': constant needs a value");
    }
    return AlphaSchedule(i.kind, std::move(params), horizon);
  }
  throw ConfigError("alpha schedule: unknown kind '" + parts[0] + "'");
}

std::string AlphaSchedule::selector() const {
  std::ostringstream os;
  os << info(kind_).name;
  for (double p : params_) {
    char buf[32];
    os << ':' << std::string_view(buf, std::to_chars(buf, buf + sizeof(buf), p).ptr);
  }
  return os.str();
}

double AlphaSchedule::value(int k) const {
  if (k < 0 || k >= horizon_) {
    throw ConfigError("alpha schedule: iteration " + std::to_string(k) + " outside [0, " +
                      std::to_string(horizon_) + ")");
  }
  const auto& p = params_;
  const double kk = static_cast<double>(k);
  const double K = static_cast<double>(horizon_);
  double a = 0.0;
  switch (kind_) {
    case Kind::constant: a = p[0]; break;
    case Kind::linear_ramp: a = horizon_ > 1 ? p[0] + (p[1] - p[0]) * kk / (K - 1.0) : p[1]; break;
    case Kind::step: a = kk < p[2] * K ? p[0] : p[1]; break;
    case Kind::ramp_hold: {
      const double len = p[1] * K;
      a = kk >= len ? p[0] : p[0] * kk / len;
      break;
    }
    case Kind::oscillate: {
      const auto period = static_cast<long>(p[2]);
      a = (k % period) < period / 2 ? p[1] : p[0];
      break;
    }
    case Kind::incremental_final: a = k == horizon_ - 1 ? 1.0 : std::min(kk / K, p[0]); break;
  }
  return std::clamp(a, 0.0, 1.0);
}

double alpha_value(const AlphaSchedule& schedule, int k) { return schedule.value(k); }

std::vector<std::string> study_schedules() {
  return {"constant:1", "constant:0.2", "linear_ramp:0:1", "step:0:1:0.5", "oscillate:0:1:10", "incremental_final:0.1"};
}

}  // namespace ptychotomo

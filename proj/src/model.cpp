#include "bmv/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bmv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::EmptyStageList: return "EmptyStageList";
    case ErrorCode::NonPositiveStageLength: return "NonPositiveStageLength";
    case ErrorCode::StagePowerLengthMismatch: return "StagePowerLengthMismatch";
    case ErrorCode::NonPositivePower: return "NonPositivePower";
    case ErrorCode::CapOutOfRange: return "CapOutOfRange";
    case ErrorCode::ThresholdOutOfRange: return "ThresholdOutOfRange";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::RhoUnity: return "RhoUnity";
    case ErrorCode::NoMassAboveZero: return "NoMassAboveZero";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

std::string join_messages(const std::vector<Violation>& violations) {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << to_string(violations[i].code) << " (" << violations[i].message << ")";
  }
  return out.str();
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ConfigError::ConfigError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::InvalidArgument : violations.front().code,
            join_messages(violations)),
      violations_(std::move(violations)) {}

bool ConfigError::has(ErrorCode code) const noexcept {
  for (const auto& v : violations_) {
    if (v.code == code) return true;
  }
  return false;
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::BMV: return "bmv";
    case PolicyKind::NPolicy: return "npolicy";
    case PolicyKind::NoPolicy: return "none";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view text) {
  if (text == "bmv" || text == "t" || text == "tpolicy") return PolicyKind::BMV;
  if (text == "npolicy" || text == "n") return PolicyKind::NPolicy;
  if (text == "none" || text == "nopolicy") return PolicyKind::NoPolicy;
  return std::nullopt;
}

PolicyConfig PolicyConfig::uniform_bmv(double stage_length, int stage_count, int queue_cap) {
  PolicyConfig p;
  p.kind = PolicyKind::BMV;
  p.stage_lengths.assign(static_cast<std::size_t>(std::max(stage_count, 0)), stage_length);
  p.queue_cap = queue_cap;
  return p;
}

PolicyConfig PolicyConfig::n_policy(int threshold, int queue_cap) {
  PolicyConfig p;
  p.kind = PolicyKind::NPolicy;
  p.n_threshold = threshold;
  p.queue_cap = queue_cap;
  return p;
}

PolicyConfig PolicyConfig::no_policy(int queue_cap) {
  PolicyConfig p;
  p.kind = PolicyKind::NoPolicy;
  p.queue_cap = queue_cap;
  return p;
}

PowerProfile PowerProfile::uniform(double p_active, double p_sleep, int stage_count) {
  PowerProfile w;
  w.p_active = p_active;
  w.p_idle = p_active;
  w.stage_powers.assign(static_cast<std::size_t>(std::max(stage_count, 0)), p_sleep);
  return w;
}

std::vector<double> ValidatedConfig::cumulative_stage_ends() const {
  std::vector<double> ends;
  ends.reserve(policy_.stage_lengths.size());
  double s = 0.0;
  for (double len : policy_.stage_lengths) {
    s += len;
    ends.push_back(s);
  }
  return ends;
}

ValidatedConfig validate_config(const TrafficModel& traffic, const PolicyConfig& policy,
                                const PowerProfile& power) {
  std::vector<Violation> bad;
  auto report = [&](ErrorCode code, std::string msg) { bad.push_back({code, std::move(msg)}); };

  if (!positive_finite(traffic.lambda)) report(ErrorCode::NonPositiveRate, "lambda must be > 0");
  if (!positive_finite(traffic.mu)) report(ErrorCode::NonPositiveRate, "mu must be > 0");
  if (policy.queue_cap < 1) report(ErrorCode::CapOutOfRange, "queue cap K must be >= 1");

  if (!positive_finite(power.p_active)) report(ErrorCode::NonPositivePower, "p_active must be > 0");
  if (!positive_finite(power.p_idle)) report(ErrorCode::NonPositivePower, "p_idle must be > 0");
  for (std::size_t i = 0; i < power.stage_powers.size(); ++i) {
    if (!positive_finite(power.stage_powers[i])) {
      report(ErrorCode::NonPositivePower, "stage power " + std::to_string(i + 1) + " must be > 0");
    }
  }

  switch (policy.kind) {
    case PolicyKind::BMV:
      if (policy.stage_lengths.empty()) {
        report(ErrorCode::EmptyStageList, "BMV needs at least one vacation stage");
      }
      for (std::size_t i = 0; i < policy.stage_lengths.size(); ++i) {
        if (!positive_finite(policy.stage_lengths[i])) {
          report(ErrorCode::NonPositiveStageLength,
                 "stage length " + std::to_string(i + 1) + " must be > 0");
        }
      }
      if (power.stage_powers.size() != policy.stage_lengths.size()) {
        report(ErrorCode::StagePowerLengthMismatch,
               std::to_string(power.stage_powers.size()) + " stage powers for " +
                   std::to_string(policy.stage_lengths.size()) + " stages");
      }
      break;
    case PolicyKind::NPolicy:
      if (policy.n_threshold < 1 || policy.n_threshold > policy.queue_cap) {
        report(ErrorCode::ThresholdOutOfRange, "N-policy threshold must lie in [1, K]");
      }
      if (power.stage_powers.size() != 1) {
        report(ErrorCode::StagePowerLengthMismatch,
               "N-policy takes exactly one off power, got " +
                   std::to_string(power.stage_powers.size()));
      }
      break;
    case PolicyKind::NoPolicy:
      break;
  }

  if (!bad.empty()) throw ConfigError(std::move(bad));
  return ValidatedConfig(traffic, policy, power);
}

}  // namespace bmv

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bmv/error.hpp"

namespace bmv {

inline constexpr int kDefaultQueueCap = 50;

/// Poisson arrivals at rate `lambda`, exponential service at rate `mu`.
struct TrafficModel {
  double lambda = 0.0;
  double mu = 0.0;

  double rho() const { return lambda / mu; }
};

enum class PolicyKind { BMV, NPolicy, NoPolicy };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view text);

/// Sleep policy. For BMV the server takes up to `stage_lengths.size()`
/// consecutive vacations, checking the queue only when a stage timer expires.
/// A T-policy is BMV with a single stage.
struct PolicyConfig {
  PolicyKind kind = PolicyKind::BMV;
  std::vector<double> stage_lengths;
  int n_threshold = 1;
  int queue_cap = kDefaultQueueCap;

  static PolicyConfig uniform_bmv(double stage_length, int stage_count,
                                  int queue_cap = kDefaultQueueCap);
  static PolicyConfig n_policy(int threshold, int queue_cap = kDefaultQueueCap);
  static PolicyConfig no_policy(int queue_cap = kDefaultQueueCap);

  int stage_count() const { return static_cast<int>(stage_lengths.size()); }
};

/// Power draw per server state. Under the N-policy `stage_powers[0]` is the
/// off power; under no policy the stage powers are unused.
struct PowerProfile {
  double p_active = 0.0;
  double p_idle = 0.0;
  std::vector<double> stage_powers;

  /// p_idle defaults to p_active.
  static PowerProfile uniform(double p_active, double p_sleep, int stage_count);
};

/// A configuration that satisfies every type invariant. Only
/// validate_config() produces one; it is immutable afterwards.
class ValidatedConfig {
 public:
  const TrafficModel& traffic() const { return traffic_; }
  const PolicyConfig& policy() const { return policy_; }
  const PowerProfile& power() const { return power_; }

  int queue_cap() const { return policy_.queue_cap; }
  /// S_i = l_1 + ... + l_i for i = 1..N_v (BMV only).
  std::vector<double> cumulative_stage_ends() const;

 private:
  friend ValidatedConfig validate_config(const TrafficModel&, const PolicyConfig&,
                                         const PowerProfile&);
  ValidatedConfig(TrafficModel t, PolicyConfig p, PowerProfile w)
      : traffic_(t), policy_(std::move(p)), power_(std::move(w)) {}

  TrafficModel traffic_;
  PolicyConfig policy_;
  PowerProfile power_;
};

/// Throws ConfigError listing every violated invariant.
ValidatedConfig validate_config(const TrafficModel& traffic, const PolicyConfig& policy,
                                const PowerProfile& power);

}  // namespace bmv

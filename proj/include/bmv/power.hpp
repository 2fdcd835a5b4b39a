#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "bmv/markov.hpp"
#include "bmv/model.hpp"

namespace bmv {

/// Which vacation stage sees the first arrival.
struct StageProbabilities {
  /// p_first_arrival[i-1] = exp(-lambda*S_{i-1}) - exp(-lambda*S_i).
  std::vector<double> p_first_arrival;
  /// exp(-lambda*S_Nv): every stage expires with the queue still empty.
  double p_no_arrival = 0.0;
};

StageProbabilities first_arrival_stage_probs(double lambda, const std::vector<double>& stage_lengths);

/// Poisson(lambda*stage_len) over 0..K-1 with the tail folded into K. With
/// `condition_nonempty` the zero entry is dropped and the rest renormalized.
QueueDist initial_queue_dist(double lambda, double stage_len, int cap, bool condition_nonempty);

/// Mean awake-empty time after the last stage: 1/lambda by memorylessness.
double expected_idle_length(double lambda);

/// One cycle type in the energy mixture. Index 1..Nv means the server woke
/// at the end of that stage; index Nv+1 means all stages expired empty and
/// the server idled until the next arrival.
struct EnergyEvent {
  int index = 0;
  double energy_ratio = 0.0;
  double weight = 0.0;
  double sleep_len = 0.0;
  double busy_len = 0.0;
  double idle_len = 0.0;
};

struct EnergyBreakdown {
  double ne = 0.0;
  std::vector<EnergyEvent> per_event;
  /// Busy length of the last wake-up stage; differs per stage only when the
  /// stage lengths differ.
  double e_busy_len = 0.0;
  double e_idle_len = 0.0;
};

EnergyBreakdown expected_normalized_energy(const ValidatedConfig& config,
                                           const AbsorptionOptions& options = {});

/// Uniform-stage form written directly in terms of r = L_s/(L_b+L_s):
/// E_i = 1 - r + r*p_s/p_a, idle charged at p_a. Kept as a second route to
/// cross-check the general per-stage code path.
double expected_normalized_energy_uniform(const TrafficModel& traffic, double stage_len,
                                          int stage_count, int cap, double p_sleep,
                                          double p_active, const AbsorptionOptions& options = {});

nlohmann::json to_json(const EnergyBreakdown& e);

}  // namespace bmv

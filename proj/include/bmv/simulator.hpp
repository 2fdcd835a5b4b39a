#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmv/model.hpp"
#include "bmv/random.hpp"

namespace bmv {

/// Server state. Under the N-policy the off period is reported as sleep
/// stage 1.
struct ServerState {
  enum class Mode { Sleeping, Idle, Busy };
  Mode mode = Mode::Sleeping;
  int stage = 0;  // 0-based, meaningful while Sleeping
};

struct StateTimes {
  double busy = 0.0;
  double idle = 0.0;
  std::vector<double> sleep;  // per stage

  double total() const;
};

struct SimOptions {
  double horizon = 0.0;
  /// Statistics ignore everything before this time. Flow counts still
  /// balance over the observed window only when it is 0.
  double warmup = 0.0;
  /// Per-event CSV trace (time,event,state,queue_length) when non-null.
  std::ostream* trace = nullptr;
};

/// Expected arrivals below which a run is flagged as too short.
inline constexpr double kMinExpectedArrivals = 1000.0;

struct SimMetrics {
  /// Total energy over p_active times observed time.
  double ne = 0.0;
  double ne_ci_halfwidth = 0.0;
  /// Mean arrival-to-departure time of served packets. Dropped packets
  /// never depart and are excluded.
  double w_mean = 0.0;
  double w_ci_halfwidth = 0.0;
  /// Time-average number of packets in the system.
  double mean_in_system = 0.0;
  double mean_in_system_ci_halfwidth = 0.0;

  std::int64_t arrivals = 0;
  std::int64_t served = 0;
  std::int64_t dropped = 0;
  std::int64_t in_flight = 0;
  double energy = 0.0;
  double observed_time = 0.0;
  StateTimes per_state_time;
  int replications = 1;
  std::vector<std::string> warnings;
};

/// One event-driven run starting asleep in stage 1 (BMV), off (N-policy) or
/// idle (no policy) with an empty queue. Arrivals that find K packets in the
/// system are dropped. Under BMV the queue is inspected only when a stage
/// timer expires. When an arrival and another event coincide the arrival is
/// processed first.
SimMetrics simulate(const ValidatedConfig& config, const SimOptions& options, RandomStream& stream);

struct Replication {
  SimMetrics summary;
  std::vector<SimMetrics> runs;
};

/// `reps` independent runs on streams (base_seed, 0..reps-1). Means and 95%
/// Student-t half-widths are taken across runs in stream order, so the
/// result does not depend on `threads`.
Replication replicate(const ValidatedConfig& config, const SimOptions& options,
                      std::uint64_t base_seed, int reps, int threads = 1);

/// Default horizon: 10^6 expected arrivals.
inline double default_horizon(double lambda) { return 1e6 / lambda; }

nlohmann::json to_json(const SimMetrics& m);

}  // namespace bmv

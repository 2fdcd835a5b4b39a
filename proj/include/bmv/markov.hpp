#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bmv/model.hpp"

namespace bmv {

inline constexpr double kDefaultEpsilon = 1e-9;
inline constexpr long kDefaultEpochCap = 10'000'000;

/// Probability vector over queue lengths 0..K.
struct QueueDist {
  std::vector<double> probs;

  int cap() const { return static_cast<int>(probs.size()) - 1; }
  double total() const;
  static QueueDist point_mass(int length, int cap);
};

/// Departure-epoch embedded chain of the M/M/1/K queue over states 0..K.
/// Entry (i, j) is the probability that the queue holds j packets just after
/// the next departure given it held i just after the previous one.
class TransitionMatrix {
 public:
  TransitionMatrix(int cap, std::vector<double> entries);

  int cap() const { return cap_; }
  int size() const { return cap_ + 1; }
  double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i * size() + j)]; }
  std::span<const double> row(int i) const {
    return {entries_.data() + static_cast<std::ptrdiff_t>(i) * size(), static_cast<std::size_t>(size())};
  }

  /// Debug dump, one row per line.
  void write_csv(std::ostream& out) const;

 private:
  int cap_;
  std::vector<double> entries_;
};

/// For 1 <= i <= K and i-1 <= j < K the entry is the probability of exactly
/// j-i+1 arrivals during one exponential service,
///   mu/(lambda+mu) * (lambda/(lambda+mu))^(j-i+1),
/// and column K absorbs the remaining row mass. Row 0 repeats row 1: an
/// arrival has to precede the next departure.
TransitionMatrix build_transition_matrix(const TrafficModel& traffic, int cap);

/// Absorption record of the masked recursion
///   [p_zero(k), other(k)] = [0, other(k-1)] * P.
/// `p_zero[k-1]` is the probability that the queue first empties at
/// departure epoch k. `residuals[k]` is the surviving (non-empty) mass after
/// epoch k, with `residuals[0]` the starting non-empty mass.
struct ZeroHitDist {
  std::vector<double> p_zero;
  std::vector<double> residuals;
  double residual = 0.0;
  long n_stop = 0;
  double initial_mass = 0.0;
};

struct AbsorptionOptions {
  double epsilon = kDefaultEpsilon;
  long max_epochs = kDefaultEpochCap;
};

/// Runs the recursion until the surviving mass drops to `epsilon` or below.
/// Mass at state 0 of `init` is discarded before the first step.
/// Throws NonConvergence past `max_epochs` and InvalidArgument for an
/// epsilon outside (0, 1) or a dimension mismatch.
ZeroHitDist zero_hit_distribution(const QueueDist& init, const TransitionMatrix& P,
                                  const AbsorptionOptions& options = {});

/// Sum over k of k * p_zero(k): the expected number of services in a busy
/// period. Multiply by 1/mu for the expected busy length. Throws
/// ResidualTooLarge when more than 1e-6 of the mass was never absorbed.
double expected_busy_epochs(const ZeroHitDist& z);

/// Conditional mean queue length among still-busy paths at each departure
/// epoch. Element 0 is `initial_length`; element k (1..n_stop) is
/// sum_i i*other_k(i) / sum_i other_k(i). Throws DivisionByZero when the
/// surviving mass underflows to zero before the recursion stops.
std::vector<double> conditional_queue_lengths(const QueueDist& init, const TransitionMatrix& P,
                                              double initial_length,
                                              const AbsorptionOptions& options = {});

/// Both results of one pass over the recursion.
struct AbsorptionTrace {
  ZeroHitDist zero_hit;
  std::vector<double> conditional_lengths;
};

AbsorptionTrace run_absorption(const QueueDist& init, const TransitionMatrix& P,
                               double initial_length, const AbsorptionOptions& options = {});

}  // namespace bmv

#include "bmv/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace bmv {

double QueueDist::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

QueueDist QueueDist::point_mass(int length, int cap) {
  if (cap < 1 || length < 0 || length > cap) {
    throw Error(ErrorCode::InvalidArgument, "point mass outside 0..K");
  }
  QueueDist d;
  d.probs.assign(static_cast<std::size_t>(cap) + 1, 0.0);
  d.probs[static_cast<std::size_t>(length)] = 1.0;
  return d;
}

TransitionMatrix::TransitionMatrix(int cap, std::vector<double> entries)
    : cap_(cap), entries_(std::move(entries)) {
  if (cap_ < 1 || entries_.size() != static_cast<std::size_t>(size()) * size()) {
    throw Error(ErrorCode::InvalidArgument, "transition matrix must be (K+1)x(K+1) with K >= 1");
  }
}

void TransitionMatrix::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < size(); ++j) {
      if (j) out << ',';
      out << (*this)(i, j);
    }
    out << '\n';
  }
  out.precision(old);
}

TransitionMatrix build_transition_matrix(const TrafficModel& traffic, int cap) {
  if (cap < 1) throw Error(ErrorCode::CapOutOfRange, "K must be >= 1");
  if (!(traffic.lambda > 0.0) || !(traffic.mu > 0.0)) {
    throw Error(ErrorCode::NonPositiveRate, "lambda and mu must be > 0");
  }
  const int n = cap + 1;
  const double total = traffic.lambda + traffic.mu;
  const double p_service_first = traffic.mu / total;
  const double p_arrival_first = traffic.lambda / total;

  // arrivals[m] = P(exactly m arrivals during one service), geometric.
  std::vector<double> arrivals(static_cast<std::size_t>(n));
  double pow = 1.0;
  for (int m = 0; m < n; ++m) {
    arrivals[static_cast<std::size_t>(m)] = p_service_first * pow;
    pow *= p_arrival_first;
  }

  std::vector<double> entries(static_cast<std::size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& { return entries[static_cast<std::size_t>(i * n + j)]; };
  for (int i = 1; i <= cap; ++i) {
    double partial = 0.0;
    for (int j = i - 1; j < cap; ++j) {
      at(i, j) = arrivals[static_cast<std::size_t>(j - i + 1)];
      partial += at(i, j);
    }
    at(i, cap) = std::max(0.0, 1.0 - partial);
  }
  for (int j = 0; j < n; ++j) at(0, j) = at(1, j);
  return TransitionMatrix(cap, std::move(entries));
}

AbsorptionTrace run_absorption(const QueueDist& init, const TransitionMatrix& P,
                               double initial_length, const AbsorptionOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  }
  if (init.cap() != P.cap()) {
    throw Error(ErrorCode::InvalidArgument, "initial distribution and matrix differ in K");
  }
  const int n = P.size();

  std::vector<double> current(init.probs);
  current[0] = 0.0;
  std::vector<double> next(static_cast<std::size_t>(n));

  AbsorptionTrace out;
  ZeroHitDist& z = out.zero_hit;
  z.initial_mass = std::accumulate(current.begin(), current.end(), 0.0);
  z.residuals.push_back(z.initial_mass);
  z.residual = z.initial_mass;
  out.conditional_lengths.push_back(initial_length);

  long epoch = 0;
  while (z.residual > options.epsilon) {
    if (epoch >= options.max_epochs) {
      throw Error(ErrorCode::NonConvergence,
                  "surviving mass " + std::to_string(z.residual) + " after " +
                      std::to_string(epoch) + " epochs");
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 1; i < n; ++i) {
      const double mass = current[static_cast<std::size_t>(i)];
      if (mass == 0.0) continue;
      const auto row = P.row(i);
      for (int j = i - 1; j < n; ++j) next[static_cast<std::size_t>(j)] += mass * row[static_cast<std::size_t>(j)];
    }
    ++epoch;
    z.p_zero.push_back(next[0]);
    next[0] = 0.0;

    double surviving = 0.0;
    double weighted = 0.0;
    for (int j = 1; j < n; ++j) {
      surviving += next[static_cast<std::size_t>(j)];
      weighted += j * next[static_cast<std::size_t>(j)];
    }
    out.conditional_lengths.push_back(surviving > 0.0 ? weighted / surviving
                                                      : std::numeric_limits<double>::quiet_NaN());
    z.residuals.push_back(surviving);
    z.residual = surviving;
    current.swap(next);
  }
  z.n_stop = epoch;
  return out;
}

ZeroHitDist zero_hit_distribution(const QueueDist& init, const TransitionMatrix& P,
                                  const AbsorptionOptions& options) {
  return run_absorption(init, P, 0.0, options).zero_hit;
}

double expected_busy_epochs(const ZeroHitDist& z) {
  if (z.residual > 1e-6) {
    throw Error(ErrorCode::ResidualTooLarge,
                "unabsorbed mass " + std::to_string(z.residual) + " exceeds 1e-6");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < z.p_zero.size(); ++k) sum += static_cast<double>(k + 1) * z.p_zero[k];
  return sum;
}

std::vector<double> conditional_queue_lengths(const QueueDist& init, const TransitionMatrix& P,
                                              double initial_length,
                                              const AbsorptionOptions& options) {
  auto trace = run_absorption(init, P, initial_length, options);
  for (std::size_t k = 1; k < trace.conditional_lengths.size(); ++k) {
    if (std::isnan(trace.conditional_lengths[k])) {
      throw Error(ErrorCode::DivisionByZero,
                  "surviving mass underflowed at epoch " + std::to_string(k));
    }
  }
  return std::move(trace.conditional_lengths);
}

}  // namespace bmv

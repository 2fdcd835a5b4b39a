#include "bmv/power.hpp"

#include <cmath>
#include <map>

#include <boost/math/special_functions/gamma.hpp>

namespace bmv {

StageProbabilities first_arrival_stage_probs(double lambda, const std::vector<double>& stage_lengths) {
  StageProbabilities out;
  out.p_first_arrival.reserve(stage_lengths.size());
  double survive = 1.0;  // exp(-lambda * S_{i-1})
  for (double len : stage_lengths) {
    const double hit = survive * -std::expm1(-lambda * len);
    out.p_first_arrival.push_back(hit);
    survive -= hit;
  }
  out.p_no_arrival = survive;
  return out;
}

QueueDist initial_queue_dist(double lambda, double stage_len, int cap, bool condition_nonempty) {
  if (cap < 1) throw Error(ErrorCode::CapOutOfRange, "K must be >= 1");
  if (!(stage_len > 0.0) || !(lambda > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda and stage length must be > 0");
  }
  const double mean = lambda * stage_len;
  const double log_mean = std::log(mean);
  QueueDist d;
  d.probs.resize(static_cast<std::size_t>(cap) + 1);
  for (int k = 0; k < cap; ++k) {
    d.probs[static_cast<std::size_t>(k)] = std::exp(-mean + k * log_mean - std::lgamma(k + 1.0));
  }
  // P(X >= K) is the regularized lower incomplete gamma P(K, mean).
  d.probs[static_cast<std::size_t>(cap)] = boost::math::gamma_p(static_cast<double>(cap), mean);

  if (condition_nonempty) {
    d.probs[0] = 0.0;
    double mass = 0.0;
    for (std::size_t k = 1; k < d.probs.size(); ++k) mass += d.probs[k];
    if (!(mass > 0.0)) throw Error(ErrorCode::NoMassAboveZero, "no mass above zero to condition on");
    for (auto& p : d.probs) p /= mass;
  }
  return d;
}

double expected_idle_length(double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveRate, "lambda must be > 0");
  return 1.0 / lambda;
}

namespace {

double busy_length(const QueueDist& init, const TransitionMatrix& P, double mu,
                   const AbsorptionOptions& options) {
  return expected_busy_epochs(zero_hit_distribution(init, P, options)) / mu;
}

}  // namespace

EnergyBreakdown expected_normalized_energy(const ValidatedConfig& config,
                                           const AbsorptionOptions& options) {
  if (config.policy().kind != PolicyKind::BMV) {
    throw Error(ErrorCode::InvalidPolicy, "energy model covers the BMV policy only");
  }
  const auto& traffic = config.traffic();
  const auto& stages = config.policy().stage_lengths;
  const auto& power = config.power();
  const int cap = config.queue_cap();
  const auto P = build_transition_matrix(traffic, cap);
  const auto probs = first_arrival_stage_probs(traffic.lambda, stages);

  std::map<double, double> busy_by_stage_len;
  auto busy_for_stage = [&](double len) {
    auto it = busy_by_stage_len.find(len);
    if (it == busy_by_stage_len.end()) {
      const auto init = initial_queue_dist(traffic.lambda, len, cap, true);
      it = busy_by_stage_len.emplace(len, busy_length(init, P, traffic.mu, options)).first;
    }
    return it->second;
  };

  EnergyBreakdown out;
  const double pa = power.p_active;
  double sleep_len = 0.0;
  double sleep_energy = 0.0;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    sleep_len += stages[i];
    sleep_energy += stages[i] * power.stage_powers[i];
    const double busy = busy_for_stage(stages[i]);
    EnergyEvent ev;
    ev.index = static_cast<int>(i) + 1;
    ev.busy_len = busy;
    ev.sleep_len = sleep_len;
    ev.weight = probs.p_first_arrival[i];
    ev.energy_ratio = (busy * pa + sleep_energy) / ((busy + sleep_len) * pa);
    out.per_event.push_back(ev);
    out.e_busy_len = busy;
  }

  const double idle = expected_idle_length(traffic.lambda);
  const double busy_after_idle =
      busy_length(QueueDist::point_mass(1, cap), P, traffic.mu, options);
  EnergyEvent last;
  last.index = static_cast<int>(stages.size()) + 1;
  last.busy_len = busy_after_idle;
  last.idle_len = idle;
  last.sleep_len = sleep_len;
  last.weight = probs.p_no_arrival;
  last.energy_ratio = (busy_after_idle * pa + sleep_energy + idle * power.p_idle) /
                      ((busy_after_idle + idle + sleep_len) * pa);
  out.per_event.push_back(last);
  out.e_idle_len = idle;

  for (const auto& ev : out.per_event) out.ne += ev.weight * ev.energy_ratio;
  return out;
}

double expected_normalized_energy_uniform(const TrafficModel& traffic, double stage_len,
                                          int stage_count, int cap, double p_sleep,
                                          double p_active, const AbsorptionOptions& options) {
  const auto P = build_transition_matrix(traffic, cap);
  const double lb =
      busy_length(initial_queue_dist(traffic.lambda, stage_len, cap, true), P, traffic.mu, options);
  const double lb_idle = busy_length(QueueDist::point_mass(1, cap), P, traffic.mu, options);
  const double ratio = p_sleep / p_active;
  const double ilen = 1.0 / traffic.lambda;

  double ne = 0.0;
  for (int i = 1; i <= stage_count; ++i) {
    const double ls = i * stage_len;
    const double r = ls / (lb + ls);
    const double weight =
        std::exp(-traffic.lambda * (i - 1) * stage_len) - std::exp(-traffic.lambda * i * stage_len);
    ne += (1.0 - r + r * ratio) * weight;
  }
  const double ls = stage_count * stage_len;
  const double r = ls / (lb_idle + ilen + ls);
  ne += (1.0 - r + r * ratio) * std::exp(-traffic.lambda * stage_count * stage_len);
  return ne;
}

nlohmann::json to_json(const EnergyBreakdown& e) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : e.per_event) {
    events.push_back({{"index", ev.index},
                      {"energy_ratio", ev.energy_ratio},
                      {"weight", ev.weight},
                      {"sleep_len", ev.sleep_len},
                      {"busy_len", ev.busy_len},
                      {"idle_len", ev.idle_len}});
  }
  return {{"ne", e.ne},
          {"per_event", events},
          {"e_busy_len", e.e_busy_len},
          {"e_idle_len", e.e_idle_len}};
}

}  // namespace bmv

#include "bmv/delay.hpp"

#include <cmath>
#include <map>

#include "bmv/power.hpp"

namespace bmv {

double mm1k_sojourn(const TrafficModel& traffic, int cap) {
  if (cap < 1) throw Error(ErrorCode::CapOutOfRange, "K must be >= 1");
  if (!(traffic.lambda > 0.0) || !(traffic.mu > 0.0)) {
    throw Error(ErrorCode::NonPositiveRate, "lambda and mu must be > 0");
  }
  const double rho = traffic.rho();
  if (rho == 1.0) {
    throw Error(ErrorCode::RhoUnity, "M/M/1/K sojourn formula is singular at rho = 1");
  }
  const double k = cap;
  if (std::abs(1.0 - rho) >= 1e-4) {
    const double num = rho * (1.0 + k * std::pow(rho, k + 1.0) - (k + 1.0) * std::pow(rho, k));
    const double den = (1.0 - rho) * (1.0 - std::pow(rho, k + 1.0));
    return num / den / traffic.lambda;
  }
  double weighted = 0.0, total = 0.0, pow = 1.0;
  for (int n = 0; n <= cap; ++n) {
    weighted += n * pow;
    total += pow;
    pow *= rho;
  }
  return weighted / total / traffic.lambda;
}

double initial_conditional_queue_len(const QueueDist& init) {
  double mass = 0.0, weighted = 0.0;
  for (std::size_t i = 1; i < init.probs.size(); ++i) {
    mass += init.probs[i];
    weighted += static_cast<double>(i) * init.probs[i];
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::NoMassAboveZero, "no queue mass above zero");
  return weighted / mass;
}

double calc_as(double lambda, double l_init) {
  if (!(l_init >= 0.0)) throw Error(ErrorCode::InvalidArgument, "l_init must be >= 0");
  double as = 0.0;
  double i = 0.0;
  double res = l_init;
  if (l_init < 1.0) {
    as = 1.0 / lambda * res;
  } else {
    while (i <= l_init) {
      if (res < 1.0) {
        as += i * (1.0 / lambda) * res;
      } else {
        as += i * (1.0 / lambda);
      }
      i += 1.0;
      res = l_init - i;
    }
  }
  return as;
}

double calc_ab(const TrafficModel& traffic, const ZeroHitDist& z, const std::vector<double>& ql) {
  if (ql.size() != z.p_zero.size() + 1) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(ql.size()) + " queue lengths for " +
                    std::to_string(z.p_zero.size()) + " absorption epochs");
  }
  const double load = traffic.lambda / traffic.mu;
  double ab = 0.0;
  double ab_i = 0.5 * ((ql[0] + ql[0] + load) / traffic.mu);  // A_b^0
  for (std::size_t i = 1; i < ql.size(); ++i) {
    ab_i += 0.5 * ((ql[i] + ql[i] + load) / traffic.mu);
    ab += z.p_zero[i - 1] * ab_i;
  }
  return ab;
}

DelayBreakdown expected_waiting_time(const ValidatedConfig& config,
                                     const AbsorptionOptions& options) {
  if (config.policy().kind != PolicyKind::BMV) {
    throw Error(ErrorCode::InvalidPolicy, "waiting-time model covers the BMV policy only");
  }
  const auto& traffic = config.traffic();
  const auto& stages = config.policy().stage_lengths;
  const int cap = config.queue_cap();

  DelayBreakdown out;
  const auto probs = first_arrival_stage_probs(traffic.lambda, stages);
  out.p_event_a = probs.p_no_arrival;
  out.w_a = mm1k_sojourn(traffic, cap);
  const double p_b = 1.0 - out.p_event_a;

  struct StageTerms {
    double l_init, a_s, a_b, alpha;
  };
  std::map<double, StageTerms> by_len;
  const auto P = build_transition_matrix(traffic, cap);
  auto terms_for = [&](double len) -> const StageTerms& {
    auto it = by_len.find(len);
    if (it != by_len.end()) return it->second;
    const auto init = initial_queue_dist(traffic.lambda, len, cap, true);
    const double l_init = initial_conditional_queue_len(init);
    const auto trace = run_absorption(init, P, l_init, options);
    for (std::size_t k = 1; k < trace.conditional_lengths.size(); ++k) {
      if (std::isnan(trace.conditional_lengths[k])) {
        throw Error(ErrorCode::DivisionByZero, "surviving mass underflowed during busy cycle");
      }
    }
    StageTerms t{l_init, calc_as(traffic.lambda, l_init),
                 calc_ab(traffic, trace.zero_hit, trace.conditional_lengths),
                 expected_busy_epochs(trace.zero_hit)};
    return by_len.emplace(len, t).first->second;
  };

  if (p_b > 0.0) {
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const double weight = probs.p_first_arrival[i] / p_b;
      if (weight == 0.0) {
        out.l_init.push_back(0.0);
        continue;
      }
      const auto& t = terms_for(stages[i]);
      out.l_init.push_back(t.l_init);
      out.a_s += weight * t.a_s;
      out.a_b += weight * t.a_b;
      out.alpha_b += weight * t.alpha;
    }
    out.w_b = (out.a_s + out.a_b) / out.alpha_b;
  }
  out.w = out.p_event_a * out.w_a + p_b * out.w_b;
  return out;
}

nlohmann::json to_json(const DelayBreakdown& d) {
  return {{"w", d.w},         {"p_event_a", d.p_event_a}, {"w_a", d.w_a},
          {"w_b", d.w_b},     {"a_s", d.a_s},             {"a_b", d.a_b},
          {"alpha_b", d.alpha_b}, {"l_init", d.l_init}};
}

}  // namespace bmv

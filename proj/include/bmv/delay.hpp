#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "bmv/markov.hpp"
#include "bmv/model.hpp"

namespace bmv {

/// Mean number in system of the M/M/1/K queue divided by lambda:
///   rho*(1 + K*rho^(K+1) - (K+1)*rho^K) / ((1-rho)*(1-rho^(K+1))) / lambda.
/// Within 1e-4 of rho = 1 the same quantity is evaluated through the
/// equivalent finite sums, which do not cancel catastrophically.
/// Throws RhoUnity at rho == 1 exactly.
double mm1k_sojourn(const TrafficModel& traffic, int cap);

/// sum_{i>=1} i*p(i) / sum_{i>=1} p(i). Throws NoMassAboveZero.
double initial_conditional_queue_len(const QueueDist& init);

/// In-queue time accumulated over a vacation for a conditional wake-up
/// queue length `l_init`, step for step:
///
///   as = 0; i = 0; res = l_init
///   if l_init < 1: as = res/lambda
///   else while i <= l_init:
///          as += (res < 1 ? i*res : i) / lambda
///          i += 1; res = l_init - i
double calc_as(double lambda, double l_init);

/// Busy-cycle in-queue time:
///   A_b^i = sum_{k=0..i} 0.5*(2*ql[k] + lambda/mu)/mu,  A_b = sum_i p_zero(i)*A_b^i.
/// `ql` must hold n_stop + 1 entries (epoch 0 through n_stop).
double calc_ab(const TrafficModel& traffic, const ZeroHitDist& z, const std::vector<double>& ql);

struct DelayBreakdown {
  double w = 0.0;
  double p_event_a = 0.0;
  double w_a = 0.0;
  double w_b = 0.0;
  double a_s = 0.0;
  double a_b = 0.0;
  /// Expected departures per busy cycle, sum_k k*p_zero(k).
  double alpha_b = 0.0;
  /// Conditional wake-up queue length per stage.
  std::vector<double> l_init;
};

/// W = P(A)*w_a + P(B)*w_b with w_a the M/M/1/K sojourn and
/// w_b = (A_s + A_b)/alpha_b, each term averaged over the wake-up stage
/// with weights P_Ls(i)/P(B).
DelayBreakdown expected_waiting_time(const ValidatedConfig& config,
                                     const AbsorptionOptions& options = {});

nlohmann::json to_json(const DelayBreakdown& d);

}  // namespace bmv

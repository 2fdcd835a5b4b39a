#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bmv/markov.hpp"
#include "bmv/model.hpp"
#include "bmv/optimizer.hpp"

namespace bmv::workbench {

/// Instances of the analytic-vs-simulation comparison. The default grid is
/// 9 vacation lengths (1/L_v = 0.1 + 0.05*i, i = 1..9) by 11 arrival rates
/// (0.05, 0.10, ..., 0.55) at mu = 0.8, N_v = 4, K = 50.
struct ValidationGrid {
  std::vector<double> lambdas;
  std::vector<double> lvs;
  int nv = 4;
  double mu = 0.8;
  int queue_cap = kDefaultQueueCap;
  double p_active = 130.0;
  double p_sleep = 75.0;
  double p_idle = 130.0;

  static ValidationGrid standard();
  std::size_t size() const { return lambdas.size() * lvs.size(); }
};

enum class Metric { NE, W };

struct ErrorRow {
  double lambda = 0.0;
  double lv = 0.0;
  int nv = 0;
  double analytic = 0.0;
  double simulated = 0.0;
  double sim_ci_halfwidth = 0.0;
  /// |analytic - simulated| / simulated
  double rel_error = 0.0;
  /// Non-empty when either path failed; such rows are left out of the mean.
  std::string error;
};

struct ErrorReport {
  Metric metric = Metric::NE;
  std::vector<ErrorRow> rows;
  double mean_error = 0.0;
  /// Sample standard deviation of rel_error over the successful rows.
  double std_error = 0.0;
  int failed = 0;

  void recompute();
};

struct ValidationOptions {
  std::uint64_t seed = 1;
  int reps = 30;
  /// Horizon = horizon_arrivals / lambda.
  double horizon_arrivals = 1e5;
  int threads = 1;
  AbsorptionOptions absorption;
};

struct ValidationResult {
  ErrorReport ne;
  ErrorReport w;
};

/// Rows come out ordered by (lv, lambda) ascending whatever the thread count.
ValidationResult run_validation(const ValidationGrid& grid, const ValidationOptions& options);

/// CSV columns: metric,lambda,lv,nv,analytic,simulated,sim_ci,rel_error,error
void write_csv(std::ostream& out, const ValidationResult& result);

std::string_view to_string(Metric m);

/// Simulated policy sweeps. Default rates and powers follow the
/// N-policy comparison setting (lambda = 550, mu = 1000, K = 50, 130/75 W).
struct CompareParams {
  TrafficModel traffic{550.0, 1000.0};
  int queue_cap = kDefaultQueueCap;
  double p_on = 130.0;
  double p_off = 75.0;
  std::vector<int> thresholds{1, 2, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  /// Overlay BMV points for bmv-vs-n. Illustrative defaults only.
  std::vector<std::pair<double, int>> bmv_candidates{{0.002, 3}, {0.004, 2}};
  /// T-policy vacation length for bmv-vs-t; BMV uses T/n for n = 1..max_n.
  double t_length = 0.01;
  int max_n = 7;
  SimBudget budget;
};

struct CompareRow {
  std::string scenario;
  std::string policy;
  std::string label;
  int param = 0;
  double lv = 0.0;
  int nv = 0;
  double ne = 0.0;
  double ne_ci = 0.0;
  double w = 0.0;
  double w_ci = 0.0;
};

std::vector<CompareRow> compare_bmv_vs_n(const CompareParams& params);
std::vector<CompareRow> compare_bmv_vs_t(const CompareParams& params);

/// CSV columns: scenario,policy,label,param,lv,nv,ne,ne_ci,w,w_ci
void write_csv(std::ostream& out, const std::vector<CompareRow>& rows);

}  // namespace bmv::workbench

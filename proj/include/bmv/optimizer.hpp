#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bmv/markov.hpp"
#include "bmv/model.hpp"

namespace bmv {

/// Candidate (L_v, N_v) grid and the waiting-time bound.
struct SearchPool {
  std::vector<double> lv_pool;
  std::vector<int> nv_pool;
  double d_const = 0.0;

  void validate() const;
};

struct CellMetrics {
  double ne = 0.0;
  double w = 0.0;
  /// 95% half-width of w when the evaluator is stochastic, else 0.
  double w_ci_halfwidth = 0.0;
  double ne_ci_halfwidth = 0.0;
};

struct OptCell {
  double lv = 0.0;
  int nv = 0;
  double ne = 0.0;
  double w = 0.0;
  double w_ci_halfwidth = 0.0;
  double ne_ci_halfwidth = 0.0;
  bool feasible = false;
  /// Set when the evaluator threw; the cell is then infeasible.
  std::string error;
};

struct VacationChoice {
  double lv = 0.0;
  int nv = 0;

  friend bool operator==(const VacationChoice&, const VacationChoice&) = default;
};

struct OptResult {
  std::optional<VacationChoice> best;
  double best_ne = 1.0;
  /// Full Cartesian product, ordered by lv then nv ascending.
  std::vector<OptCell> evaluations;
  std::string source;

  const OptCell* find(double lv, int nv) const;
};

using CellEvaluator = std::function<CellMetrics(double lv, int nv)>;

/// Exhaustive search: feasible means W < d_const (strict). The minimizer of
/// NE wins; equal NE goes to the smaller lv, then the smaller nv. A cell
/// whose evaluator throws is recorded as infeasible and the search goes on.
OptResult opt_search(const SearchPool& pool, const CellEvaluator& evaluate,
                     const std::string& source = "analytic");

/// Everything fixed except the (L_v, N_v) pair under search.
struct CellTemplate {
  TrafficModel traffic;
  int queue_cap = kDefaultQueueCap;
  double p_active = 130.0;
  double p_sleep = 75.0;
  double p_idle = 130.0;

  ValidatedConfig config_for(double lv, int nv) const;
};

/// Analytic NE and W for each cell.
CellEvaluator analytic_evaluator(const CellTemplate& cell, const AbsorptionOptions& options = {});

struct SimBudget {
  double horizon = 0.0;  // 0 selects 10^5 expected arrivals
  std::uint64_t base_seed = 1;
  int reps = 30;
  int threads = 1;
};

/// Replicated simulation for each cell.
CellEvaluator simulation_evaluator(const CellTemplate& cell, const SimBudget& budget);

OptResult brute_force_sim(const CellTemplate& cell, const SearchPool& pool, const SimBudget& budget);

/// Pools of the worked case study.
SearchPool reference_pool(double d_const = 2.0);

/// CSV columns: lv,nv,ne,w,feasible,source
void write_csv(std::ostream& out, const OptResult& result, bool header = true);

}  // namespace bmv

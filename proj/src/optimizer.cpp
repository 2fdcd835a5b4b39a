#include "bmv/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bmv/delay.hpp"
#include "bmv/power.hpp"
#include "bmv/simulator.hpp"

namespace bmv {

void SearchPool::validate() const {
  if (lv_pool.empty() || nv_pool.empty()) {
    throw Error(ErrorCode::InvalidArgument, "search pools must be non-empty");
  }
  for (double lv : lv_pool) {
    if (!(lv > 0.0)) throw Error(ErrorCode::NonPositiveStageLength, "pool L_v must be > 0");
  }
  for (int nv : nv_pool) {
    if (nv < 1) throw Error(ErrorCode::EmptyStageList, "pool N_v must be >= 1");
  }
  if (!(d_const > 0.0)) throw Error(ErrorCode::InvalidArgument, "delay bound must be > 0");
}

const OptCell* OptResult::find(double lv, int nv) const {
  for (const auto& c : evaluations) {
    if (c.lv == lv && c.nv == nv) return &c;
  }
  return nullptr;
}

OptResult opt_search(const SearchPool& pool, const CellEvaluator& evaluate, const std::string& source) {
  pool.validate();
  std::vector<double> lvs = pool.lv_pool;
  std::vector<int> nvs = pool.nv_pool;
  std::sort(lvs.begin(), lvs.end());
  lvs.erase(std::unique(lvs.begin(), lvs.end()), lvs.end());
  std::sort(nvs.begin(), nvs.end());
  nvs.erase(std::unique(nvs.begin(), nvs.end()), nvs.end());

  OptResult out;
  out.source = source;
  for (double lv : lvs) {
    for (int nv : nvs) {
      OptCell cell;
      cell.lv = lv;
      cell.nv = nv;
      try {
        const auto m = evaluate(lv, nv);
        cell.ne = m.ne;
        cell.w = m.w;
        cell.w_ci_halfwidth = m.w_ci_halfwidth;
        cell.ne_ci_halfwidth = m.ne_ci_halfwidth;
        cell.feasible = std::isfinite(m.w) && std::isfinite(m.ne) && m.w < pool.d_const;
      } catch (const std::exception& e) {
        cell.error = e.what();
        cell.ne = cell.w = std::nan("");
      }
      out.evaluations.push_back(cell);
    }
  }
  // Canonical (lv, nv) order plus a strict comparison gives the tie-break.
  for (const auto& cell : out.evaluations) {
    if (!cell.feasible) continue;
    if (!out.best || cell.ne < out.best_ne) {
      out.best = VacationChoice{cell.lv, cell.nv};
      out.best_ne = cell.ne;
    }
  }
  return out;
}

ValidatedConfig CellTemplate::config_for(double lv, int nv) const {
  auto power = PowerProfile::uniform(p_active, p_sleep, nv);
  power.p_idle = p_idle;
  return validate_config(traffic, PolicyConfig::uniform_bmv(lv, nv, queue_cap), power);
}

CellEvaluator analytic_evaluator(const CellTemplate& cell, const AbsorptionOptions& options) {
  return [cell, options](double lv, int nv) {
    const auto cfg = cell.config_for(lv, nv);
    CellMetrics m;
    m.ne = expected_normalized_energy(cfg, options).ne;
    m.w = expected_waiting_time(cfg, options).w;
    return m;
  };
}

CellEvaluator simulation_evaluator(const CellTemplate& cell, const SimBudget& budget) {
  return [cell, budget](double lv, int nv) {
    const auto cfg = cell.config_for(lv, nv);
    SimOptions opt;
    opt.horizon = budget.horizon > 0.0 ? budget.horizon : 1e5 / cell.traffic.lambda;
    const auto rep = replicate(cfg, opt, budget.base_seed, budget.reps, budget.threads);
    CellMetrics m;
    m.ne = rep.summary.ne;
    m.w = rep.summary.w_mean;
    m.ne_ci_halfwidth = rep.summary.ne_ci_halfwidth;
    m.w_ci_halfwidth = rep.summary.w_ci_halfwidth;
    return m;
  };
}

OptResult brute_force_sim(const CellTemplate& cell, const SearchPool& pool, const SimBudget& budget) {
  return opt_search(pool, simulation_evaluator(cell, budget), "simulation");
}

SearchPool reference_pool(double d_const) {
  return {{0.2, 0.5, 0.8, 1.1, 1.6, 2.1, 3.0, 4.0, 6.0}, {1, 2, 3, 4, 5, 6}, d_const};
}

void write_csv(std::ostream& out, const OptResult& result, bool header) {
  const auto old = out.precision(12);
  if (header) out << "lv,nv,ne,w,feasible,source\n";
  for (const auto& c : result.evaluations) {
    out << c.lv << ',' << c.nv << ',' << c.ne << ',' << c.w << ',' << (c.feasible ? 1 : 0) << ','
        << result.source << '\n';
  }
  out.precision(old);
}

}  // namespace bmv

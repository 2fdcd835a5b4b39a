#include "bmv/workbench.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "bmv/delay.hpp"
#include "bmv/power.hpp"
#include "bmv/random.hpp"
#include "bmv/simulator.hpp"

namespace bmv::workbench {

ValidationGrid ValidationGrid::standard() {
  ValidationGrid g;
  for (int i = 1; i <= 9; ++i) g.lvs.push_back(1.0 / (0.1 + 0.05 * i));
  std::sort(g.lvs.begin(), g.lvs.end());
  for (int j = 1; j <= 11; ++j) g.lambdas.push_back(0.05 * j);
  return g;
}

std::string_view to_string(Metric m) { return m == Metric::NE ? "ne" : "w"; }

void ErrorReport::recompute() {
  double sum = 0.0;
  int n = 0;
  failed = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failed;
      continue;
    }
    sum += r.rel_error;
    ++n;
  }
  mean_error = n > 0 ? sum / n : std::nan("");
  double ss = 0.0;
  for (const auto& r : rows) {
    if (r.error.empty()) ss += (r.rel_error - mean_error) * (r.rel_error - mean_error);
  }
  std_error = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp<long>(threads, 1, static_cast<long>(std::max<std::size_t>(count, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

ValidationResult run_validation(const ValidationGrid& grid, const ValidationOptions& options) {
  if (grid.lambdas.empty() || grid.lvs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "validation grid is empty");
  }
  struct Instance {
    double lambda, lv;
  };
  std::vector<double> lvs = grid.lvs, lambdas = grid.lambdas;
  std::sort(lvs.begin(), lvs.end());
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<Instance> instances;
  for (double lv : lvs) {
    for (double lambda : lambdas) instances.push_back({lambda, lv});
  }

  ValidationResult out;
  out.ne.metric = Metric::NE;
  out.w.metric = Metric::W;
  out.ne.rows.resize(instances.size());
  out.w.rows.resize(instances.size());

  parallel_for(instances.size(), options.threads, [&](std::size_t i) {
    const auto [lambda, lv] = instances[i];
    ErrorRow& ne_row = out.ne.rows[i];
    ErrorRow& w_row = out.w.rows[i];
    for (ErrorRow* row : {&ne_row, &w_row}) {
      row->lambda = lambda;
      row->lv = lv;
      row->nv = grid.nv;
    }
    try {
      CellTemplate cell;
      cell.traffic = {lambda, grid.mu};
      cell.queue_cap = grid.queue_cap;
      cell.p_active = grid.p_active;
      cell.p_sleep = grid.p_sleep;
      cell.p_idle = grid.p_idle;
      const auto cfg = cell.config_for(lv, grid.nv);

      ne_row.analytic = expected_normalized_energy(cfg, options.absorption).ne;
      w_row.analytic = expected_waiting_time(cfg, options.absorption).w;

      SimOptions sim;
      sim.horizon = options.horizon_arrivals / lambda;
      const auto rep = replicate(cfg, sim, derive_seed(options.seed, i), options.reps, 1);
      ne_row.simulated = rep.summary.ne;
      ne_row.sim_ci_halfwidth = rep.summary.ne_ci_halfwidth;
      w_row.simulated = rep.summary.w_mean;
      w_row.sim_ci_halfwidth = rep.summary.w_ci_halfwidth;
      ne_row.rel_error = std::abs(ne_row.analytic - ne_row.simulated) / ne_row.simulated;
      w_row.rel_error = std::abs(w_row.analytic - w_row.simulated) / w_row.simulated;
    } catch (const std::exception& e) {
      ne_row.error = w_row.error = e.what();
    }
  });

  out.ne.recompute();
  out.w.recompute();
  return out;
}

void write_csv(std::ostream& out, const ValidationResult& result) {
  const auto old = out.precision(12);
  out << "metric,lambda,lv,nv,analytic,simulated,sim_ci,rel_error,error\n";
  for (const ErrorReport* report : {&result.ne, &result.w}) {
    for (const auto& r : report->rows) {
      out << to_string(report->metric) << ',' << r.lambda << ',' << r.lv << ',' << r.nv << ','
          << r.analytic << ',' << r.simulated << ',' << r.sim_ci_halfwidth << ',' << r.rel_error
          << ",\"" << r.error << "\"\n";
    }
  }
  out.precision(old);
}

namespace {

SimOptions budget_options(const CompareParams& p) {
  SimOptions opt;
  opt.horizon = p.budget.horizon > 0.0 ? p.budget.horizon : 1e5 / p.traffic.lambda;
  return opt;
}

CompareRow run_row(const ValidatedConfig& cfg, const CompareParams& p, std::uint64_t seed) {
  const auto rep = replicate(cfg, budget_options(p), seed, p.budget.reps, p.budget.threads);
  CompareRow row;
  row.ne = rep.summary.ne;
  row.ne_ci = rep.summary.ne_ci_halfwidth;
  row.w = rep.summary.w_mean;
  row.w_ci = rep.summary.w_ci_halfwidth;
  return row;
}

ValidatedConfig bmv_config(const CompareParams& p, double lv, int nv) {
  auto power = PowerProfile::uniform(p.p_on, p.p_off, nv);
  return validate_config(p.traffic, PolicyConfig::uniform_bmv(lv, nv, p.queue_cap), power);
}

}  // namespace

std::vector<CompareRow> compare_bmv_vs_n(const CompareParams& p) {
  std::vector<CompareRow> rows;
  std::vector<int> thresholds = p.thresholds;
  std::sort(thresholds.begin(), thresholds.end());
  for (int n : thresholds) {
    PowerProfile power{p.p_on, p.p_on, {p.p_off}};
    const auto cfg = validate_config(p.traffic, PolicyConfig::n_policy(n, p.queue_cap), power);
    auto row = run_row(cfg, p, p.budget.base_seed);
    row.scenario = "bmv-vs-n";
    row.policy = "npolicy";
    row.label = "N=" + std::to_string(n);
    row.param = n;
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < p.bmv_candidates.size(); ++i) {
    const auto [lv, nv] = p.bmv_candidates[i];
    auto row = run_row(bmv_config(p, lv, nv), p, p.budget.base_seed);
    row.scenario = "bmv-vs-n";
    row.policy = "bmv";
    row.label = "illustrative candidate " + std::to_string(i + 1);
    row.lv = lv;
    row.nv = nv;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CompareRow> compare_bmv_vs_t(const CompareParams& p) {
  if (p.max_n < 1 || !(p.t_length > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bmv-vs-t needs max_n >= 1 and T > 0");
  }
  std::vector<CompareRow> rows;
  // A T-policy is one vacation of length T.
  auto t_row = run_row(bmv_config(p, p.t_length, 1), p, p.budget.base_seed);
  t_row.scenario = "bmv-vs-t";
  t_row.policy = "tpolicy";
  t_row.label = "T";
  t_row.param = 1;
  t_row.lv = p.t_length;
  t_row.nv = 1;
  rows.push_back(std::move(t_row));
  for (int n = 1; n <= p.max_n; ++n) {
    const double lv = p.t_length / n;
    auto row = run_row(bmv_config(p, lv, n), p, p.budget.base_seed);
    row.scenario = "bmv-vs-t";
    row.policy = "bmv";
    row.label = "n=" + std::to_string(n);
    row.param = n;
    row.lv = lv;
    row.nv = n;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  const auto old = out.precision(12);
  out << "scenario,policy,label,param,lv,nv,ne,ne_ci,w,w_ci\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.policy << ",\"" << r.label << "\"," << r.param << ',' << r.lv
        << ',' << r.nv << ',' << r.ne << ',' << r.ne_ci << ',' << r.w << ',' << r.w_ci << '\n';
  }
  out.precision(old);
}

}  // namespace bmv::workbench

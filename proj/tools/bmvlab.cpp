// bmvlab: analytic, simulation, optimization and base-station scenarios for
// the bounded multi-vacation sleep policy.
//
// Exit codes: 0 success, 1 infeasible or empty result, 2 invalid input,
// 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bmv/basestation.hpp"
#include "bmv/config_io.hpp"
#include "bmv/delay.hpp"
#include "bmv/optimizer.hpp"
#include "bmv/power.hpp"
#include "bmv/simulator.hpp"
#include "bmv/workbench.hpp"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kInfeasible = 1, kInvalid = 2, kNumerical = 3 };

struct ConfigFlags {
  std::string config_path;
  std::optional<double> lambda, mu, p_active, p_idle;
  std::optional<int> cap, n_threshold;
  std::optional<std::string> policy, stage_lengths, stage_powers;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Key-value config file");
    cmd->add_option("--lambda", lambda, "Arrival rate");
    cmd->add_option("--mu", mu, "Service rate");
    cmd->add_option("--cap", cap, "Queue capacity K");
    cmd->add_option("--policy", policy, "bmv | npolicy | none");
    cmd->add_option("--stage-lengths", stage_lengths, "Comma-separated vacation stage lengths");
    cmd->add_option("--stage-powers", stage_powers, "Comma-separated sleep powers");
    cmd->add_option("--p-active", p_active, "Power while serving");
    cmd->add_option("--p-idle", p_idle, "Power while awake and empty (default p-active)");
    cmd->add_option("--n-threshold", n_threshold, "N-policy threshold");
  }

  bmv::ValidatedConfig build() const {
    bmv::RawConfig raw;
    raw.policy.queue_cap = bmv::kDefaultQueueCap;
    bool file_idle = false;
    if (!config_path.empty()) {
      raw = bmv::load_config_file(config_path);
      file_idle = true;
    }
    std::ostringstream overrides;
    if (policy) overrides << "policy = " << *policy << "\n";
    if (stage_lengths) overrides << "stage_lengths = " << *stage_lengths << "\n";
    if (stage_powers) overrides << "stage_powers = " << *stage_powers << "\n";
    const auto extra = bmv::parse_config_text(overrides.str());
    if (policy) raw.policy.kind = extra.policy.kind;
    if (stage_lengths) raw.policy.stage_lengths = extra.policy.stage_lengths;
    if (stage_powers) raw.power.stage_powers = extra.power.stage_powers;
    if (lambda) raw.traffic.lambda = *lambda;
    if (mu) raw.traffic.mu = *mu;
    if (cap) raw.policy.queue_cap = *cap;
    if (n_threshold) raw.policy.n_threshold = *n_threshold;
    if (p_active) raw.power.p_active = *p_active;
    if (p_idle) {
      raw.power.p_idle = *p_idle;
    } else if (!file_idle) {
      raw.power.p_idle = raw.power.p_active;
    }
    return bmv::validate(raw);
  }
};

std::vector<double> parse_doubles(const std::string& text) {
  return bmv::parse_config_text("stage_lengths = " + text).policy.stage_lengths;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_doubles(text)) {
    if (v != static_cast<int>(v)) throw bmv::Error(bmv::ErrorCode::ParseError, "expected integers: " + text);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string resolve_out(const std::string& out) {
  namespace fs = std::filesystem;
  if (out.empty() || out == "-") return out;
  fs::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("BMVLAB_OUT_DIR"); dir && *dir) p = fs::path(dir) / p;
  }
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

// Writes to --out when given, otherwise stdout.
void emit(const std::string& out, const std::string& text) {
  const auto path = resolve_out(out);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path);
  if (!f) throw bmv::Error(bmv::ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

int exit_for(bmv::ErrorCode code) {
  switch (code) {
    case bmv::ErrorCode::NonConvergence:
    case bmv::ErrorCode::ResidualTooLarge:
    case bmv::ErrorCode::DivisionByZero:
      return kNumerical;
    default:
      return kInvalid;
  }
}

json error_json(const bmv::Error& e) {
  json j{{"error", std::string(bmv::to_string(e.code()))}, {"message", e.what()}};
  if (const auto* ce = dynamic_cast<const bmv::ConfigError*>(&e)) {
    json all = json::array();
    for (const auto& v : ce->violations()) {
      all.push_back({{"code", std::string(bmv::to_string(v.code))}, {"message", v.message}});
    }
    j["violations"] = all;
  }
  return j;
}

json opt_json(const bmv::OptResult& r) {
  json cells = json::array();
  for (const auto& c : r.evaluations) {
    json cell{{"lv", c.lv}, {"nv", c.nv}, {"feasible", c.feasible}};
    cell["ne"] = std::isfinite(c.ne) ? json(c.ne) : json(nullptr);
    cell["w"] = std::isfinite(c.w) ? json(c.w) : json(nullptr);
    if (c.w_ci_halfwidth > 0.0) cell["w_ci_halfwidth"] = c.w_ci_halfwidth;
    if (!c.error.empty()) cell["error"] = c.error;
    cells.push_back(cell);
  }
  json j{{"source", r.source}, {"evaluations", cells}};
  if (r.best) {
    j["best"] = {{"lv", r.best->lv}, {"nv", r.best->nv}};
    j["best_ne"] = r.best_ne;
  } else {
    j["best"] = nullptr;
  }
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded multi-vacation sleep-control workbench"};
  app.require_subcommand(1);

  double epsilon = bmv::kDefaultEpsilon;
  std::string out;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Analytic NE and W for a BMV config (JSON)");
  ConfigFlags analyze_cfg;
  analyze_cfg.attach(analyze);
  analyze->add_option("--epsilon", epsilon, "Absorption truncation");
  analyze->add_option("--out", out, "Output file (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Replicated discrete-event simulation (JSON)");
  ConfigFlags sim_cfg;
  sim_cfg.attach(simulate);
  std::uint64_t seed = 0;
  int reps = 30;
  int threads = 1;
  double horizon = 0.0;
  double warmup = 0.0;
  std::string trace_path;
  simulate->add_option("--seed", seed, "Base seed")->required();
  simulate->add_option("--reps", reps, "Replications (1 = single run)")->check(CLI::PositiveNumber);
  simulate->add_option("--horizon", horizon, "Simulated time per replication (default 1e6/lambda)");
  simulate->add_option("--warmup", warmup, "Discarded initial time");
  simulate->add_option("--threads", threads, "Worker threads");
  simulate->add_option("--trace", trace_path, "Per-event CSV trace (requires --reps 1)");
  simulate->add_option("--out", out, "Output file (default stdout)");

  // validate
  auto* validate = app.add_subcommand("validate", "Analytic vs simulated error over a grid");
  std::string lambda_grid, lv_grid, csv_path;
  double grid_mu = 0.8;
  int grid_nv = 4;
  double horizon_arrivals = 1e5;
  validate->add_option("--seed", seed, "Base seed")->required();
  validate->add_option("--reps", reps, "Replications per instance")->check(CLI::Range(2, 100000));
  validate->add_option("--threads", threads, "Worker threads");
  validate->add_option("--lambda-grid", lambda_grid, "Arrival rates (default 0.05..0.55)");
  validate->add_option("--lv-grid", lv_grid, "Vacation lengths (default 1/(0.1+0.05i), i=1..9)");
  validate->add_option("--mu", grid_mu, "Service rate");
  validate->add_option("--nv", grid_nv, "Vacation count");
  validate->add_option("--horizon-arrivals", horizon_arrivals, "Expected arrivals per replication");
  double grid_pa = 130.0, grid_ps = 75.0;
  validate->add_option("--p-active", grid_pa, "Active and idle power");
  validate->add_option("--p-sleep", grid_ps, "Sleep power");
  validate->add_option("--epsilon", epsilon, "Absorption truncation");
  validate->add_option("--csv", csv_path, "Per-instance CSV");
  validate->add_option("--out", out, "Summary JSON (default stdout)");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Search (L_v, N_v) for minimal NE under a delay bound");
  double opt_lambda = 0.3, opt_mu = 0.8, dmax = 2.0, opt_pa = 130.0, opt_ps = 75.0;
  int opt_cap = bmv::kDefaultQueueCap;
  std::optional<double> opt_pi;
  std::string lv_pool, nv_pool, mode = "analytic";
  std::optional<std::uint64_t> opt_seed;
  optimize->add_option("--lambda", opt_lambda, "Arrival rate");
  optimize->add_option("--mu", opt_mu, "Service rate");
  optimize->add_option("--cap", opt_cap, "Queue capacity K");
  optimize->add_option("--dmax", dmax, "Waiting-time bound (strict)");
  optimize->add_option("--lv-pool", lv_pool, "Candidate vacation lengths");
  optimize->add_option("--nv-pool", nv_pool, "Candidate vacation counts");
  optimize->add_option("--p-active", opt_pa, "Active power");
  optimize->add_option("--p-sleep", opt_ps, "Sleep power");
  optimize->add_option("--p-idle", opt_pi, "Idle power (default p-active)");
  optimize->add_option("--mode", mode, "analytic | sim | both")
      ->check(CLI::IsMember({"analytic", "sim", "both"}));
  optimize->add_option("--seed", opt_seed, "Base seed (required for sim and both)");
  optimize->add_option("--reps", reps, "Replications per cell");
  optimize->add_option("--horizon", horizon, "Simulated time per replication (default 1e5/lambda)");
  optimize->add_option("--threads", threads, "Worker threads");
  optimize->add_option("--epsilon", epsilon, "Absorption truncation");
  optimize->add_option("--csv", csv_path, "Evaluation table CSV");
  optimize->add_option("--out", out, "Result JSON (default stdout)");

  // compare
  auto* compare = app.add_subcommand("compare", "Simulated policy comparisons (CSV)");
  std::string scenario;
  bmv::workbench::CompareParams cmp;
  std::string thresholds, candidates;
  compare->add_option("--scenario", scenario, "bmv-vs-n | bmv-vs-t")
      ->required()
      ->check(CLI::IsMember({"bmv-vs-n", "bmv-vs-t"}));
  compare->add_option("--seed", seed, "Base seed")->required();
  compare->add_option("--reps", cmp.budget.reps, "Replications per row");
  compare->add_option("--horizon", cmp.budget.horizon, "Simulated time per replication");
  compare->add_option("--threads", cmp.budget.threads, "Worker threads");
  compare->add_option("--lambda", cmp.traffic.lambda, "Arrival rate");
  compare->add_option("--mu", cmp.traffic.mu, "Service rate");
  compare->add_option("--cap", cmp.queue_cap, "Queue capacity K");
  compare->add_option("--p-on", cmp.p_on, "Active power");
  compare->add_option("--p-off", cmp.p_off, "Sleep/off power");
  compare->add_option("--thresholds", thresholds, "N-policy thresholds to sweep");
  compare->add_option("--candidates", candidates, "BMV overlays as lv:nv,lv:nv");
  compare->add_option("--t-length", cmp.t_length, "T-policy vacation length");
  compare->add_option("--max-n", cmp.max_n, "Largest BMV split for bmv-vs-t");
  compare->add_option("--out", out, "Output CSV (default stdout)");

  // bs
  auto* bs = app.add_subcommand("bs", "Four-stage base-station scenarios (CSV)");
  int bs_case = 1;
  int points = 10;
  double rho_min = 0.04, rho_max = 0.4;
  std::optional<double> bs_rate;
  bs->add_option("--case", bs_case, "1: sweep lambda at fixed mu; 2: sweep load with DFS")
      ->check(CLI::IsMember({1, 2}));
  bs->add_option("--points", points, "Grid points")->check(CLI::PositiveNumber);
  bs->add_option("--rho-min", rho_min, "Smallest load");
  bs->add_option("--rho-max", rho_max, "Largest load");
  bs->add_option("--rate", bs_rate, "Case 1: mu (default 35025); case 2: lambda (default 2000)");
  bs->add_option("--cap", cmp.queue_cap, "Queue capacity K");
  bs->add_option("--epsilon", epsilon, "Absorption truncation");
  bs->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    const bmv::AbsorptionOptions absorption{epsilon, bmv::kDefaultEpochCap};

    if (*analyze) {
      const auto cfg = analyze_cfg.build();
      const auto energy = bmv::expected_normalized_energy(cfg, absorption);
      const auto delay = bmv::expected_waiting_time(cfg, absorption);
      json j{{"config", bmv::to_json(cfg)},
             {"ne", energy.ne},
             {"w", delay.w},
             {"energy", bmv::to_json(energy)},
             {"delay", bmv::to_json(delay)}};
      emit(out, dump(j));
      return kOk;
    }

    if (*simulate) {
      const auto cfg = sim_cfg.build();
      bmv::SimOptions opt;
      opt.horizon = horizon > 0.0 ? horizon : bmv::default_horizon(cfg.traffic().lambda);
      opt.warmup = warmup;
      json j{{"config", bmv::to_json(cfg)}, {"seed", seed}, {"horizon", opt.horizon}};
      if (reps == 1) {
        std::ofstream trace;
        if (!trace_path.empty()) {
          trace.open(resolve_out(trace_path));
          opt.trace = &trace;
        }
        bmv::RandomStream stream(seed, 0);
        j["metrics"] = bmv::to_json(bmv::simulate(cfg, opt, stream));
      } else {
        if (!trace_path.empty()) {
          throw bmv::Error(bmv::ErrorCode::InvalidArgument, "--trace needs --reps 1");
        }
        const auto rep = bmv::replicate(cfg, opt, seed, reps, threads);
        j["metrics"] = bmv::to_json(rep.summary);
      }
      emit(out, dump(j));
      return kOk;
    }

    if (*validate) {
      auto grid = bmv::workbench::ValidationGrid::standard();
      if (!lambda_grid.empty()) grid.lambdas = parse_doubles(lambda_grid);
      if (!lv_grid.empty()) grid.lvs = parse_doubles(lv_grid);
      grid.mu = grid_mu;
      grid.nv = grid_nv;
      grid.p_active = grid.p_idle = grid_pa;
      grid.p_sleep = grid_ps;
      bmv::workbench::ValidationOptions vo;
      vo.seed = seed;
      vo.reps = reps;
      vo.threads = threads;
      vo.horizon_arrivals = horizon_arrivals;
      vo.absorption = absorption;
      const auto result = bmv::workbench::run_validation(grid, vo);
      if (!csv_path.empty()) {
        std::ostringstream csv;
        bmv::workbench::write_csv(csv, result);
        emit(csv_path, csv.str());
      }
      json j{{"instances", grid.size()}, {"seed", seed}, {"reps", reps}};
      for (const auto* r : {&result.ne, &result.w}) {
        j[std::string(bmv::workbench::to_string(r->metric))] = {
            {"mean_error", r->mean_error}, {"std_error", r->std_error}, {"failed", r->failed}};
      }
      emit(out, dump(j));
      return kOk;
    }

    if (*optimize) {
      bmv::CellTemplate cell;
      cell.traffic = {opt_lambda, opt_mu};
      cell.queue_cap = opt_cap;
      cell.p_active = opt_pa;
      cell.p_sleep = opt_ps;
      cell.p_idle = opt_pi.value_or(opt_pa);
      auto pool = bmv::reference_pool(dmax);
      if (!lv_pool.empty()) pool.lv_pool = parse_doubles(lv_pool);
      if (!nv_pool.empty()) pool.nv_pool = parse_ints(nv_pool);
      if (mode != "analytic" && !opt_seed) {
        throw bmv::Error(bmv::ErrorCode::InvalidArgument, "--seed is required for --mode " + mode);
      }
      // Validates the fixed part of the template once up front.
      (void)cell.config_for(pool.lv_pool.front(), pool.nv_pool.front());

      bmv::SimBudget budget;
      budget.horizon = horizon;
      budget.base_seed = opt_seed.value_or(0);
      budget.reps = reps;
      budget.threads = threads;

      json j{{"lambda", opt_lambda}, {"mu", opt_mu}, {"dmax", dmax}};
      std::ostringstream csv;
      bool header = true;
      std::optional<bmv::OptResult> analytic, simulated;
      if (mode != "sim") {
        analytic = bmv::opt_search(pool, bmv::analytic_evaluator(cell, absorption), "analytic");
        j["analytic"] = opt_json(*analytic);
        bmv::write_csv(csv, *analytic, header);
        header = false;
      }
      if (mode != "analytic") {
        simulated = bmv::brute_force_sim(cell, pool, budget);
        j["simulation"] = opt_json(*simulated);
        bmv::write_csv(csv, *simulated, header);
      }
      if (analytic && simulated) {
        if (analytic->best && simulated->best) {
          const auto* pick = simulated->find(analytic->best->lv, analytic->best->nv);
          const auto* truth = simulated->find(simulated->best->lv, simulated->best->nv);
          j["relative_error"] = {std::abs(pick->ne - truth->ne) / truth->ne,
                                 std::abs(pick->w - truth->w) / truth->w};
        } else {
          j["relative_error"] = nullptr;
        }
      }
      if (!csv_path.empty()) emit(csv_path, csv.str());
      emit(out, dump(j));
      const bool found = (!analytic || analytic->best) && (!simulated || simulated->best);
      return found ? kOk : kInfeasible;
    }

    if (*compare) {
      cmp.budget.base_seed = seed;
      if (!thresholds.empty()) cmp.thresholds = parse_ints(thresholds);
      if (!candidates.empty()) {
        cmp.bmv_candidates.clear();
        std::string text = candidates;
        std::replace(text.begin(), text.end(), ':', ' ');
        const auto values = parse_doubles(text);
        if (values.size() % 2 != 0) {
          throw bmv::Error(bmv::ErrorCode::ParseError, "--candidates expects lv:nv pairs");
        }
        for (std::size_t i = 0; i < values.size(); i += 2) {
          cmp.bmv_candidates.emplace_back(values[i], static_cast<int>(values[i + 1]));
        }
      }
      const auto rows = scenario == "bmv-vs-n" ? bmv::workbench::compare_bmv_vs_n(cmp)
                                               : bmv::workbench::compare_bmv_vs_t(cmp);
      std::ostringstream csv;
      bmv::workbench::write_csv(csv, rows);
      emit(out, csv.str());
      return kOk;
    }

    if (*bs) {
      namespace bs_ns = bmv::bs;
      bs_ns::BaseStationProfile profile;
      profile.queue_cap = cmp.queue_cap;
      const auto loads = bs_ns::linspace(rho_min, rho_max, points);
      std::vector<bs_ns::ScenarioRow> rows;
      if (bs_case == 1) {
        const double mu = bs_rate.value_or(bs_ns::kCase1Mu);
        std::vector<double> lambdas;
        for (double r : loads) lambdas.push_back(r * mu);
        rows = bs_ns::case1_sweep(lambdas, mu, profile, absorption);
      } else {
        const double lambda = bs_rate.value_or(bs_ns::kCase2Lambda);
        const auto model = bs_ns::beta_from_operating_point(profile.p_active, bs_ns::kCase1Mu);
        rows = bs_ns::case2_sweep(loads, lambda, model, profile, absorption);
      }
      std::ostringstream csv;
      bs_ns::write_csv(csv, rows);
      emit(out, csv.str());
      return kOk;
    }
  } catch (const bmv::Error& e) {
    std::cerr << dump(error_json(e));
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << dump(json{{"error", "InternalError"}, {"message", e.what()}});
    return kNumerical;
  }
  return kOk;
}

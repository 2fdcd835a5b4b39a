#include "bmv/basestation.hpp"

#include <ostream>

#include "bmv/delay.hpp"
#include "bmv/power.hpp"

namespace bmv::bs {

ValidatedConfig BaseStationProfile::config(double lambda, double mu) const {
  return config(lambda, mu, p_active);
}

ValidatedConfig BaseStationProfile::config(double lambda, double mu, double p_active_override) const {
  PolicyConfig policy;
  policy.kind = PolicyKind::BMV;
  policy.stage_lengths = stage_lengths;
  policy.queue_cap = queue_cap;
  PowerProfile power{p_active_override, p_idle, stage_powers};
  return validate_config({lambda, mu}, policy, power);
}

DfsModel beta_from_operating_point(double p_active, double mu) {
  if (!(p_active > 0.0) || !(mu > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "operating point needs positive power and rate");
  }
  return {p_active / mu};
}

double dfs_power(const DfsModel& model, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::NonPositiveRate, "mu must be > 0");
  return model.beta * mu;
}

namespace {

ScenarioRow evaluate(const ValidatedConfig& cfg, const AbsorptionOptions& options) {
  ScenarioRow row;
  row.lambda = cfg.traffic().lambda;
  row.mu = cfg.traffic().mu;
  row.rho = cfg.traffic().rho();
  row.p_active = cfg.power().p_active;
  row.ne = expected_normalized_energy(cfg, options).ne;
  row.w = expected_waiting_time(cfg, options).w;
  row.energy_per_packet = row.ne * row.p_active / row.lambda;
  return row;
}

}  // namespace

std::vector<ScenarioRow> case1_sweep(const std::vector<double>& lambda_grid, double mu,
                                     const BaseStationProfile& profile,
                                     const AbsorptionOptions& options) {
  if (lambda_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty arrival-rate grid");
  std::vector<ScenarioRow> rows;
  rows.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) rows.push_back(evaluate(profile.config(lambda, mu), options));
  return rows;
}

std::vector<ScenarioRow> case2_sweep(const std::vector<double>& rho_grid, double lambda,
                                     const DfsModel& model, const BaseStationProfile& profile,
                                     const AbsorptionOptions& options) {
  if (rho_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty load grid");
  std::vector<ScenarioRow> rows;
  rows.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "traffic load must be > 0");
    const double mu = lambda / rho;
    rows.push_back(evaluate(profile.config(lambda, mu, dfs_power(model, mu)), options));
  }
  return rows;
}

std::vector<double> linspace(double first, double last, int count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "linspace needs count >= 1");
  if (count == 1) return {first};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = first + (last - first) * i / (count - 1);
  return out;
}

void write_csv(std::ostream& out, const std::vector<ScenarioRow>& rows) {
  const auto old = out.precision(12);
  out << "lambda,mu,rho,p_active,ne,w,energy_per_packet\n";
  for (const auto& r : rows) {
    out << r.lambda << ',' << r.mu << ',' << r.rho << ',' << r.p_active << ',' << r.ne << ','
        << r.w << ',' << r.energy_per_packet << '\n';
  }
  out.precision(old);
}

}  // namespace bmv::bs

#pragma once

#include <iosfwd>
#include <vector>

#include "bmv/markov.hpp"
#include "bmv/model.hpp"

namespace bmv::bs {

/// Four-stage 5G sleep configuration. Stage powers pair positionally with
/// stage lengths.
struct BaseStationProfile {
  std::vector<double> stage_lengths{0.0000714, 0.001, 0.01, 1.0};  // s
  std::vector<double> stage_powers{25.5, 2.9, 2.0, 1.8};           // W
  double p_active = 234.2;                                        // W
  double p_idle = 38.2;                                           // W
  int queue_cap = kDefaultQueueCap;

  ValidatedConfig config(double lambda, double mu) const;
  ValidatedConfig config(double lambda, double mu, double p_active_override) const;
};

inline constexpr double kCase1Mu = 35025.0;
inline constexpr double kCase2Lambda = 2000.0;

/// Service power under dynamic frequency scaling at fixed voltage: p = beta*mu.
struct DfsModel {
  double beta = 0.0;
};

DfsModel beta_from_operating_point(double p_active, double mu);
double dfs_power(const DfsModel& model, double mu);

struct ScenarioRow {
  double lambda = 0.0;
  double mu = 0.0;
  double rho = 0.0;
  double p_active = 0.0;
  double ne = 0.0;
  double w = 0.0;
  /// ne * p_active / lambda: joules per offered packet.
  double energy_per_packet = 0.0;
};

/// Analytic NE and W per arrival rate at fixed service rate.
std::vector<ScenarioRow> case1_sweep(const std::vector<double>& lambda_grid, double mu,
                                     const BaseStationProfile& profile,
                                     const AbsorptionOptions& options = {});

/// Analytic NE and W per traffic load at fixed arrival rate; mu = lambda/rho
/// and p_active = beta*mu on every row.
std::vector<ScenarioRow> case2_sweep(const std::vector<double>& rho_grid, double lambda,
                                     const DfsModel& model, const BaseStationProfile& profile,
                                     const AbsorptionOptions& options = {});

/// `count` evenly spaced points from `first` to `last` inclusive.
std::vector<double> linspace(double first, double last, int count);

/// CSV columns: lambda,mu,rho,p_active,ne,w,energy_per_packet
void write_csv(std::ostream& out, const std::vector<ScenarioRow>& rows);

}  // namespace bmv::bs

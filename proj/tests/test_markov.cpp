#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "bmv/markov.hpp"
#include "bmv/power.hpp"
#include "bmv/random.hpp"

namespace {

using bmv::QueueDist;

// Probability of exactly n arrivals during one service, by quadrature.
double arrivals_during_service(double lambda, double mu, int n) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double t) {
    if (!(t > 0.0)) return n == 0 ? mu : 0.0;
    return mu * std::exp(-(lambda + mu) * t + n * std::log(lambda * t) - std::lgamma(n + 1.0));
  };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

TEST(TransitionMatrix, UnitRatesFirstRow) {
  const auto P = bmv::build_transition_matrix({1.0, 1.0}, 10);
  EXPECT_DOUBLE_EQ(P(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(P(1, 1), 0.25);
  EXPECT_DOUBLE_EQ(P(1, 2), 0.125);
  EXPECT_EQ(P.size(), 11);
}

TEST(TransitionMatrix, NoArrivalLimit) {
  const auto P = bmv::build_transition_matrix({1e-9, 1.0}, 10);
  for (int i = 1; i <= 10; ++i) EXPECT_NEAR(P(i, i - 1), 1.0, 1e-8);
}

TEST(TransitionMatrix, RowStochasticAndStructure) {
  for (double lambda : {1e-9, 0.05, 0.3, 0.8, 1.5, 40.0}) {
    for (double mu : {0.8, 1.0, 35025.0}) {
      for (int cap : {1, 2, 7, 50}) {
        const auto P = bmv::build_transition_matrix({lambda, mu}, cap);
        for (int i = 0; i <= cap; ++i) {
          const auto row = P.row(i);
          const double sum = std::accumulate(row.begin(), row.end(), 0.0);
          EXPECT_NEAR(sum, 1.0, 1e-12) << lambda << ' ' << mu << ' ' << cap << ' ' << i;
          for (int j = 0; j <= cap; ++j) {
            EXPECT_GE(P(i, j), 0.0);
            EXPECT_LE(P(i, j), 1.0);
            if (i >= 1 && j < i - 1) {
              EXPECT_EQ(P(i, j), 0.0);
            }
          }
        }
        for (int j = 0; j <= cap; ++j) EXPECT_EQ(P(0, j), P(1, j));
      }
    }
  }
}

TEST(TransitionMatrix, ClosedFormMatchesQuadrature) {
  const std::vector<std::pair<double, double>> rates{
      {0.3, 0.8}, {1.0, 1.0}, {0.05, 0.8}, {0.55, 0.8}, {2.0, 0.5}, {550.0, 1000.0}};
  const int cap = 12;
  for (auto [lambda, mu] : rates) {
    const auto P = bmv::build_transition_matrix({lambda, mu}, cap);
    for (int i = 1; i <= cap; ++i) {
      double partial = 0.0;
      for (int j = i - 1; j < cap; ++j) {
        const double q = arrivals_during_service(lambda, mu, j - i + 1);
        EXPECT_NEAR(P(i, j), q, 1e-9) << lambda << ' ' << mu << ' ' << i << ' ' << j;
        partial += q;
      }
      EXPECT_NEAR(P(i, cap), 1.0 - partial, 1e-9);
    }
  }
}

TEST(TransitionMatrix, CsvDump) {
  const auto P = bmv::build_transition_matrix({1.0, 1.0}, 2);
  std::ostringstream out;
  P.write_csv(out);
  int lines = 0;
  for (char c : out.str()) lines += c == '\n';
  EXPECT_EQ(lines, 3);
}

TEST(ZeroHit, SingleDepartureEmptiesQueue) {
  const auto P = bmv::build_transition_matrix({1e-9, 1.0}, 50);
  const auto z = bmv::zero_hit_distribution(QueueDist::point_mass(1, 50), P);
  EXPECT_NEAR(z.p_zero.at(0), 1.0, 1e-8);
  EXPECT_LE(z.residual, 1e-9);
  EXPECT_NEAR(bmv::expected_busy_epochs(z), 1.0, 1e-8);
}

TEST(ZeroHit, TwoServicesNoArrivals) {
  const auto P = bmv::build_transition_matrix({1e-12, 1.0}, 50);
  const auto z = bmv::zero_hit_distribution(QueueDist::point_mass(2, 50), P);
  EXPECT_NEAR(bmv::expected_busy_epochs(z), 2.0, 1e-9);
}

TEST(ZeroHit, LedgerIdentityAndStrictDecrease) {
  for (double lambda : {0.05, 0.3, 0.55, 0.7}) {
    const bmv::TrafficModel t{lambda, 0.8};
    const auto P = bmv::build_transition_matrix(t, 50);
    std::vector<QueueDist> inits{QueueDist::point_mass(1, 50),
                                 bmv::initial_queue_dist(lambda, 4.0, 50, true),
                                 bmv::initial_queue_dist(lambda, 0.5, 50, true)};
    for (const auto& init : inits) {
      const auto z = bmv::zero_hit_distribution(init, P);
      ASSERT_EQ(z.residuals.size(), z.p_zero.size() + 1);
      EXPECT_LE(z.residual, 1e-9);
      double absorbed = 0.0;
      for (std::size_t k = 0; k < z.p_zero.size(); ++k) {
        absorbed += z.p_zero[k];
        EXPECT_NEAR(z.initial_mass - absorbed, z.residuals[k + 1], 1e-10);
        EXPECT_LT(z.residuals[k + 1], z.residuals[k]) << "epoch " << k + 1;
        EXPECT_GT(z.p_zero[k], 0.0);
      }
      EXPECT_NEAR(z.initial_mass, 1.0, 1e-12);
    }
  }
}

TEST(ZeroHit, MassAtCapIsMonotone) {
  const auto P = bmv::build_transition_matrix({2.0, 1.0}, 10);
  bmv::AbsorptionOptions opts;
  opts.epsilon = 1e-3;
  const auto z = bmv::zero_hit_distribution(QueueDist::point_mass(10, 10), P, opts);
  // Before any absorption the summed mass may move by an ulp.
  for (std::size_t k = 1; k < z.residuals.size(); ++k) {
    EXPECT_LE(z.residuals[k], z.residuals[k - 1] * (1.0 + 1e-15));
  }
  EXPECT_LT(z.residual, z.residuals.front());
  // The queue cannot empty before K departures.
  for (int k = 0; k < 9; ++k) EXPECT_EQ(z.p_zero[static_cast<std::size_t>(k)], 0.0);
}

TEST(ZeroHit, EpochCapRaisesNonConvergence) {
  const auto P = bmv::build_transition_matrix({5.0, 1.0}, 10);
  bmv::AbsorptionOptions opts;
  opts.max_epochs = 20;
  try {
    bmv::zero_hit_distribution(QueueDist::point_mass(10, 10), P, opts);
    FAIL();
  } catch (const bmv::Error& e) {
    EXPECT_EQ(e.code(), bmv::ErrorCode::NonConvergence);
  }
}

TEST(ZeroHit, RejectsBadEpsilon) {
  const auto P = bmv::build_transition_matrix({0.3, 0.8}, 5);
  for (double eps : {0.0, 1.0, -1.0}) {
    bmv::AbsorptionOptions opts;
    opts.epsilon = eps;
    EXPECT_THROW(bmv::zero_hit_distribution(QueueDist::point_mass(1, 5), P, opts), bmv::Error);
  }
}

TEST(ZeroHit, ResidualTooLargeForBusyEpochs) {
  bmv::ZeroHitDist z;
  z.p_zero = {0.5};
  z.residual = 0.5;
  try {
    bmv::expected_busy_epochs(z);
    FAIL();
  } catch (const bmv::Error& e) {
    EXPECT_EQ(e.code(), bmv::ErrorCode::ResidualTooLarge);
  }
}

TEST(ZeroHit, BusyPeriodMeanMatchesMM1) {
  const double mu = 0.8;
  for (double rho : {0.1, 0.3, 0.375, 0.5, 0.7}) {
    const bmv::TrafficModel t{rho * mu, mu};
    const auto P = bmv::build_transition_matrix(t, 50);
    const auto z = bmv::zero_hit_distribution(QueueDist::point_mass(1, 50), P);
    const double busy = bmv::expected_busy_epochs(z) / mu;
    const double expected = 1.0 / (mu - t.lambda);
    EXPECT_NEAR(busy / expected, 1.0, 0.01) << rho;
  }
}

// Continuous-time busy period from one packet: returns departures until empty
// and records the queue length after each departure.
int mc_busy_period(bmv::RandomStream& s, double lambda, double mu, int cap,
                   std::vector<int>* trace) {
  int q = 1;
  int departures = 0;
  while (q > 0) {
    const double u = s.uniform();
    if (u < lambda / (lambda + mu)) {
      if (q < cap) ++q;
    } else {
      --q;
      ++departures;
      if (trace) trace->push_back(q);
    }
  }
  return departures;
}

TEST(ZeroHit, AbsorptionHistogramMatchesMonteCarlo) {
  const double lambda = 0.3, mu = 0.8;
  const auto P = bmv::build_transition_matrix({lambda, mu}, 50);
  const auto z = bmv::zero_hit_distribution(QueueDist::point_mass(1, 50), P);
  double total = 0.0;
  for (double p : z.p_zero) total += p;
  EXPECT_GE(total, 1.0 - 1e-9);

  const int reps = 1'000'000;
  const int bins = 12;
  std::vector<int> hist(bins + 1, 0);
  bmv::RandomStream s(99, 0);
  for (int r = 0; r < reps; ++r) {
    const int k = mc_busy_period(s, lambda, mu, 50, nullptr);
    if (k <= bins) ++hist[static_cast<std::size_t>(k)];
  }
  for (int k = 1; k <= bins; ++k) {
    const double p = z.p_zero[static_cast<std::size_t>(k - 1)];
    const double sigma = std::sqrt(p * (1.0 - p) / reps);
    EXPECT_NEAR(static_cast<double>(hist[static_cast<std::size_t>(k)]) / reps, p, 3.0 * sigma) << k;
  }
}

TEST(ConditionalLengths, DegenerateCases) {
  const auto P = bmv::build_transition_matrix({1e-12, 1.0}, 50);
  const auto one = bmv::run_absorption(QueueDist::point_mass(1, 50), P, 1.0);
  EXPECT_EQ(one.conditional_lengths.front(), 1.0);
  EXPECT_EQ(one.conditional_lengths.size(), one.zero_hit.p_zero.size() + 1);

  const auto ql = bmv::conditional_queue_lengths(QueueDist::point_mass(2, 50), P, 2.0);
  ASSERT_GE(ql.size(), 2u);
  EXPECT_EQ(ql[0], 2.0);
  EXPECT_NEAR(ql[1], 1.0, 1e-9);
}

TEST(ConditionalLengths, UnderflowRaisesDivisionByZero) {
  // lambda = 0 exactly: the surviving mass is 0 after the first epoch but the
  // recursion is asked for more precision than that mass allows.
  std::vector<double> entries(4, 0.0);
  entries[0 * 2 + 0] = 1.0;
  entries[1 * 2 + 0] = 1.0;
  const bmv::TransitionMatrix P(1, entries);
  const auto z = bmv::run_absorption(QueueDist::point_mass(1, 1), P, 1.0);
  EXPECT_EQ(z.zero_hit.residual, 0.0);
  EXPECT_TRUE(std::isnan(z.conditional_lengths.back()));
  EXPECT_THROW(bmv::conditional_queue_lengths(QueueDist::point_mass(1, 1), P, 1.0), bmv::Error);
}

TEST(ConditionalLengths, MatchesMonteCarloTrace) {
  const double lambda = 0.4, mu = 0.8;
  const int cap = 50;
  const auto P = bmv::build_transition_matrix({lambda, mu}, cap);
  const auto ql = bmv::conditional_queue_lengths(QueueDist::point_mass(1, cap), P, 1.0);

  const int epochs = 10;
  std::vector<double> sum(epochs + 1, 0.0), sq(epochs + 1, 0.0);
  std::vector<int> count(epochs + 1, 0);
  bmv::RandomStream s(123, 0);
  std::vector<int> trace;
  for (int r = 0; r < 400'000; ++r) {
    trace.clear();
    mc_busy_period(s, lambda, mu, cap, &trace);
    for (int k = 1; k <= epochs && k <= static_cast<int>(trace.size()); ++k) {
      const int q = trace[static_cast<std::size_t>(k - 1)];
      if (q == 0) break;
      sum[k] += q;
      sq[k] += static_cast<double>(q) * q;
      ++count[k];
    }
  }
  for (int k = 1; k <= epochs; ++k) {
    const double n = count[k];
    const double mean = sum[k] / n;
    const double var = sq[k] / n - mean * mean;
    EXPECT_NEAR(ql[static_cast<std::size_t>(k)], mean, 3.0 * std::sqrt(var / n)) << k;
  }
}

}  // namespace

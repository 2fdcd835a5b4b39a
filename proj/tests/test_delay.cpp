#include <cmath>

#include <gtest/gtest.h>

#include "bmv/delay.hpp"
#include "bmv/optimizer.hpp"
#include "bmv/power.hpp"

namespace {

TEST(MM1K, LargeCapIsMM1) {
  EXPECT_NEAR(bmv::mm1k_sojourn({0.3, 0.8}, 50), 2.0, 1e-9);
}

TEST(MM1K, NearUnityAtCapOne) {
  EXPECT_NEAR(bmv::mm1k_sojourn({1.0 - 1e-9, 1.0}, 1), 0.5, 1e-8);
  // K=1 reduces to rho/((1+rho)*lambda) = 1/(lambda+mu).
  EXPECT_NEAR(bmv::mm1k_sojourn({0.3, 0.8}, 1), 1.0 / 1.1, 1e-12);
}

TEST(MM1K, LightLoadIsServiceTime) {
  EXPECT_NEAR(bmv::mm1k_sojourn({1e-9, 0.8}, 50), 1.0 / 0.8, 1e-8);
}

TEST(MM1K, RhoUnityIsTypedError) {
  try {
    bmv::mm1k_sojourn({1.0, 1.0}, 10);
    FAIL();
  } catch (const bmv::Error& e) {
    EXPECT_EQ(e.code(), bmv::ErrorCode::RhoUnity);
  }
}

TEST(MM1K, SumFormContinuousAcrossSwitch) {
  // Both sides of the switch to the finite-sum evaluation agree.
  const double a = bmv::mm1k_sojourn({1.0 - 1.0001e-4, 1.0}, 20);
  const double b = bmv::mm1k_sojourn({1.0 - 0.9999e-4, 1.0}, 20);
  EXPECT_NEAR(a, b, 1e-6);
}

TEST(InitialLength, Values) {
  EXPECT_DOUBLE_EQ(bmv::initial_conditional_queue_len(bmv::QueueDist::point_mass(1, 50)), 1.0);
  const auto d = bmv::initial_queue_dist(0.3, 1.25, 50, false);
  EXPECT_NEAR(bmv::initial_conditional_queue_len(d), 0.375 / (1.0 - std::exp(-0.375)), 1e-12);
  EXPECT_NEAR(bmv::initial_conditional_queue_len(d), 1.19915, 1e-4);
  bmv::QueueDist u{{0.0, 0.5, 0.5}};
  EXPECT_DOUBLE_EQ(bmv::initial_conditional_queue_len(u), 1.5);
}

TEST(InitialLength, NoMass) {
  try {
    bmv::initial_conditional_queue_len(bmv::QueueDist::point_mass(0, 5));
    FAIL();
  } catch (const bmv::Error& e) {
    EXPECT_EQ(e.code(), bmv::ErrorCode::NoMassAboveZero);
  }
}

TEST(CalcAs, AlgorithmTraces) {
  EXPECT_DOUBLE_EQ(bmv::calc_as(1.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(bmv::calc_as(1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(bmv::calc_as(1.0, 2.5), 2.0);
  EXPECT_DOUBLE_EQ(bmv::calc_as(2.0, 2.5), 1.0);
  EXPECT_DOUBLE_EQ(bmv::calc_as(1.0, 0.0), 0.0);
}

TEST(CalcAs, ContinuousAtIntegers) {
  for (double n : {2.0, 3.0, 7.0}) {
    const double d = 1e-9;
    EXPECT_NEAR(bmv::calc_as(1.0, n - d), bmv::calc_as(1.0, n), 1e-6) << n;
    EXPECT_NEAR(bmv::calc_as(1.0, n + d), bmv::calc_as(1.0, n), 1e-6) << n;
  }
}

TEST(CalcAs, EarlyBranchJumpAtOne) {
  // Below 1 the early branch returns res/lambda; at 1 the loop adds 0 + 1*0.
  EXPECT_NEAR(bmv::calc_as(1.0, 1.0 - 1e-9), 1.0, 1e-8);
  EXPECT_DOUBLE_EQ(bmv::calc_as(1.0, 1.0), 0.0);
}

TEST(CalcAb, NoArrivalTrace) {
  bmv::ZeroHitDist z;
  z.p_zero = {1.0};
  z.residuals = {1.0, 0.0};
  EXPECT_NEAR(bmv::calc_ab({0.0, 1.0}, z, {1.0, 1.0}), 2.0, 1e-15);
}

TEST(CalcAb, ArithmeticTrace) {
  bmv::ZeroHitDist z;
  z.p_zero = {1.0};
  EXPECT_NEAR(bmv::calc_ab({0.4, 0.8}, z, {1.0, 1.0}), 3.125, 1e-12);
}

TEST(CalcAb, InverseInServiceRate) {
  bmv::ZeroHitDist z;
  z.p_zero = {0.6, 0.3, 0.1};
  const std::vector<double> ql{1.0, 1.5, 2.0, 1.2};
  const double a = bmv::calc_ab({0.4, 0.8}, z, ql);
  const double b = bmv::calc_ab({0.8, 1.6}, z, ql);
  EXPECT_NEAR(b, a / 2.0, 1e-12);
}

TEST(CalcAb, LengthMismatch) {
  bmv::ZeroHitDist z;
  z.p_zero = {1.0};
  try {
    bmv::calc_ab({0.4, 0.8}, z, {1.0});
    FAIL();
  } catch (const bmv::Error& e) {
    EXPECT_EQ(e.code(), bmv::ErrorCode::LengthMismatch);
  }
}

bmv::ValidatedConfig uniform(double lambda, double mu, double lv, int nv) {
  return bmv::validate_config({lambda, mu}, bmv::PolicyConfig::uniform_bmv(lv, nv, 50),
                              bmv::PowerProfile::uniform(130, 75, nv));
}

TEST(WaitingTime, MixtureAndBounds) {
  for (double lambda : {0.05, 0.3, 0.55}) {
    for (double lv : {0.2, 2.0, 6.0}) {
      const auto d = bmv::expected_waiting_time(uniform(lambda, 0.8, lv, 4));
      EXPECT_NEAR(d.w, d.p_event_a * d.w_a + (1.0 - d.p_event_a) * d.w_b, 1e-12);
      EXPECT_GE(d.w, std::min(d.w_a, d.w_b) - 1e-12);
      EXPECT_LE(d.w, std::max(d.w_a, d.w_b) + 1e-12);
      EXPECT_NEAR(d.p_event_a, std::exp(-lambda * lv * 4), 1e-15);
      EXPECT_GE(d.a_s, 0.0);
      EXPECT_GE(d.a_b, 0.0);
      EXPECT_GT(d.alpha_b, 0.0);
    }
  }
}

TEST(WaitingTime, LongSleepIsEventB) {
  const auto d = bmv::expected_waiting_time(uniform(0.3, 0.8, 1000.0, 1));
  EXPECT_LT(d.p_event_a, 1e-100);
  EXPECT_NEAR(d.w, d.w_b, 1e-12);
}

TEST(WaitingTime, ShortSleepIsEventA) {
  const auto d = bmv::expected_waiting_time(uniform(0.3, 0.8, 1e-12, 1));
  EXPECT_NEAR(d.w, bmv::mm1k_sojourn({0.3, 0.8}, 50), 1e-9);
}

TEST(WaitingTime, NonDecreasingInVacationLength) {
  const auto pool = bmv::reference_pool();
  for (int nv : pool.nv_pool) {
    double prev = 0.0;
    for (double lv : pool.lv_pool) {
      const double w = bmv::expected_waiting_time(uniform(0.3, 0.8, lv, nv)).w;
      EXPECT_GE(w, prev - 1e-12) << lv << ' ' << nv;
      prev = w;
    }
  }
}

TEST(WaitingTime, JsonAudit) {
  const auto j = bmv::to_json(bmv::expected_waiting_time(uniform(0.3, 0.8, 0.8, 3)));
  for (const char* key : {"w", "p_event_a", "w_a", "w_b", "a_s", "a_b", "alpha_b"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

}  // namespace

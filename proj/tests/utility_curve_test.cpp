#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "safe_contract/utility_curve.hpp"

using namespace safe_contract;

namespace {

// max over beta <= cap of the principal's utility along the beta curve, by dense sampling.
double dense_max(const AgentSpec& agent, const BetaCurve& curve, double cap, int samples = 20000) {
   double best = -std::numeric_limits<double>::infinity();
   for (int k = 0; k <= samples; ++k) {
      const double g = curve.gamma_ir() + (1.0 - curve.gamma_ir()) * k / samples;
      const double b = curve(g);
      if (b <= cap) {
         const double r = agent.actions[curve.piece_at(g).owner].reward;
         best = std::max(best, (1.0 - g) * r - b * agent.kappa_i);
      }
   }
   return best;
}

} // namespace

TEST(UtilityCurve, SingleActionClosedForm) {
   const UtilityCurve u = build_utility_curve(fixtures::unit1());
   EXPECT_NEAR(u.beta_min(), 0.1, 1e-12);
   EXPECT_NEAR(u.beta_cap(), 1.0 / 3.0, 1e-12);
   for (int k = 0; k <= 100; ++k) {
      const double b = 0.1 + (1.0 / 3.0 - 0.1) * k / 100.0;
      EXPECT_NEAR(utility_at(u, b), 10.0 - 1.0 / b - b, 1e-9) << b;
   }
   EXPECT_NEAR(utility_at(u, 0.2), 4.8, 1e-12);
   EXPECT_NEAR(utility_at(u, 0.1), -0.1, 1e-12);
   EXPECT_NEAR(utility_at(u, 0.5), 20.0 / 3.0, 1e-12);
   const EffectiveContract e = u.effective(0.2);
   EXPECT_NEAR(e.contract.gamma, 0.5, 1e-12);
   EXPECT_NEAR(e.contract.beta, 0.2, 1e-12);
}

TEST(UtilityCurve, BelowMinimum) {
   const UtilityCurve u = build_utility_curve(fixtures::unit1());
   try {
      (void)utility_at(u, 0.05);
      FAIL();
   } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::below_min_inspection);
   }
}

TEST(UtilityCurve, DegenerateWithoutSafetyCost) {
   const UtilityCurve u = build_utility_curve(fixtures::unit1(1.0, 0.0));
   EXPECT_EQ(u.beta_min(), 0.0);
   EXPECT_EQ(u.beta_cap(), 0.0);
   EXPECT_NEAR(utility_at(u, 0.0), 8.0, 1e-12);
   EXPECT_NEAR(utility_at(u, 0.7), 8.0, 1e-12);
}

TEST(UtilityCurve, MinBeta) {
   EXPECT_NEAR(min_beta(fixtures::unit1()), 0.1, 1e-12);
   EXPECT_EQ(min_beta(fixtures::unit1(1.0, 0.0)), 0.0);
   EXPECT_NEAR(min_beta(fixtures::six_action_agent()), 1.0 / 13.0, 1e-12);
}

TEST(UtilityCurve, TopMatchesSingleAgentOptimum) {
   for (const auto& agent : {fixtures::unit1(), fixtures::unit1(16.0), fixtures::six_action_agent(), fixtures::six_action_agent(0.15)}) {
      const UtilityCurve u = build_utility_curve(agent);
      EXPECT_NEAR(u(u.beta_cap()), solve_single(agent).utility, 1e-9);
   }
}

TEST(UtilityCurveProperty, MatchesDenseMaximum) {
   std::mt19937_64 rng(41);
   std::uniform_real_distribution<double> u01(0.0, 1.0);
   for (int trial = 0; trial < 60; ++trial) {
      const auto agent = fixtures::random_agent(rng);
      const BetaCurve curve = build_beta_curve(agent);
      const UtilityCurve u = build_utility_curve(agent, curve);
      for (int k = 0; k < 10; ++k) {
         const double cap = u.beta_min() + (u.beta_cap() - u.beta_min()) * u01(rng);
         const double dense = dense_max(agent, curve, cap);
         // the curve is exact; the dense sample can only fall short
         ASSERT_GE(u(cap), dense - 1e-9) << "trial " << trial << " cap " << cap;
         ASSERT_LE(u(cap), dense + 5e-3) << "trial " << trial << " cap " << cap;
      }
   }
}

TEST(UtilityCurveProperty, NondecreasingAndContinuous) {
   std::mt19937_64 rng(42);
   for (int trial = 0; trial < 200; ++trial) {
      const auto agent = fixtures::random_agent(rng);
      const UtilityCurve u = build_utility_curve(agent);
      double prev = u(u.beta_min());
      for (int k = 1; k <= 500; ++k) {
         const double b = u.beta_min() + (u.beta_cap() - u.beta_min()) * k / 500.0;
         const double v = u(b);
         ASSERT_GE(v, prev - 1e-12);
         prev = v;
      }
      for (const auto& seg : u.segments()) {
         ASSERT_NEAR(seg.value(seg.beta_hi), u(seg.beta_hi), 1e-9);
      }
   }
}

TEST(UtilityCurveProperty, EffectiveContractIsImplementable) {
   std::mt19937_64 rng(43);
   std::uniform_real_distribution<double> u01(0.0, 1.0);
   for (int trial = 0; trial < 200; ++trial) {
      const auto agent = fixtures::random_agent(rng);
      const UtilityCurve u = build_utility_curve(agent);
      const double cap = u.beta_min() + (u.beta_cap() - u.beta_min()) * u01(rng);
      const EffectiveContract e = u.effective(cap);
      ASSERT_LE(e.contract.beta, cap + 1e-12);
      ASSERT_GE(e.contract.beta, u.beta_min() - 1e-12);
      const Response r = agent_best_response(agent, e.contract, 1e-9);
      ASSERT_TRUE(r && r->safe) << "trial " << trial;
      ASSERT_NEAR(principal_utility(agent, e.contract, r), e.utility, 1e-9);
   }
}

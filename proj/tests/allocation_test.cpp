#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "safe_contract/allocation.hpp"
#include "safe_contract/oracle.hpp"

using namespace safe_contract;

namespace {

AllocationProblem copies(const AgentSpec& a, std::size_t m, int budget, double delta) {
   return AllocationProblem{std::vector<AgentSpec>(m, a), budget, delta, std::nullopt};
}

double cap_sum(const Allocation& a) {
   double s = 0.0;
   for (const auto& x : a.agents) {
      s += x.cap;
   }
   return s;
}

} // namespace

TEST(GapBound, Formula) {
   const std::vector<AgentSpec> one{fixtures::unit1()};
   const std::vector<AgentSpec> four(4, fixtures::unit1());
   EXPECT_NEAR(gap_bound(one, 0.01), 0.99, 1e-12);
   EXPECT_EQ(gap_bound(one, 0.0), 0.0);
   EXPECT_NEAR(gap_bound(four, 0.01), 3.96, 1e-12);
   const std::vector<AgentSpec> free{fixtures::unit1(1.0, 0.0)};
   EXPECT_EQ(gap_bound(free, 0.01), 0.0);
   const std::vector<AgentSpec> costly{fixtures::unit1(500.0)};
   EXPECT_EQ(gap_bound(costly, 0.01), 0.0);
}

TEST(Allocate, FourCopiesShareOneInspector) {
   const Allocation a = allocate(copies(fixtures::unit1(), 4, 1, 0.01));
   EXPECT_NEAR(a.total_utility, 23.0, 0.15);
   EXPECT_NEAR(a.gap_bound, 3.96, 1e-12);
   for (const auto& x : a.agents) {
      EXPECT_NEAR(x.cap, 0.25, 0.011);
   }
   EXPECT_LE(cap_sum(a), 1.0 + 1e-12);
}

TEST(Allocate, SlackBudget) {
   const Allocation a = allocate(copies(fixtures::unit1(), 2, 2, 0.01));
   EXPECT_NEAR(a.total_utility, 40.0 / 3.0, 1e-9);
   for (const auto& x : a.agents) {
      EXPECT_NEAR(x.effective.contract.beta, 1.0 / 3.0, 1e-12);
      EXPECT_NEAR(x.effective.contract.gamma, 0.3, 1e-12);
   }
}

TEST(Allocate, SingleAgentReducesToSolveSingle) {
   for (const auto& agent : {fixtures::unit1(), fixtures::six_action_agent(), fixtures::unit1(16.0)}) {
      const Allocation a = allocate(AllocationProblem{{agent}, 1, 0.01, std::nullopt});
      const SingleSolution s = solve_single(agent);
      EXPECT_NEAR(a.total_utility, s.utility, 1e-9);
      EXPECT_NEAR(a.agents[0].effective.contract.gamma, s.contract.gamma, 1e-9);
      EXPECT_NEAR(a.agents[0].effective.contract.beta, s.contract.beta, 1e-9);
   }
}

TEST(Allocate, InfeasibleBudget) {
   try {
      (void)allocate(copies(fixtures::unit1(), 11, 1, 0.01));
      FAIL();
   } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::infeasible_budget);
   }
}

TEST(Allocate, EpsilonConversion) {
   auto p = copies(fixtures::unit1(), 4, 1, 0.0);
   p.delta.reset();
   p.epsilon = 0.1;
   const auto curves = build_utility_curves(p.agents);
   // U_1(1 - 3 * 0.1) = U_1(0.7) = 20/3, m = 4, max R^2 / kappa_s = 100.
   EXPECT_NEAR(delta_from_epsilon(p.agents, curves, 1, 0.1), 0.1 * (20.0 / 3.0) / 400.0, 1e-12);
   const Allocation a = allocate(p);
   EXPECT_NEAR(a.delta, 0.1 * (20.0 / 3.0) / 400.0, 1e-12);
   EXPECT_GE(a.total_utility, 23.0 - 0.1 * 23.0);
}

TEST(Allocate, NonpositiveLowerBound) {
   // Ten copies: the first agent is left with exactly beta_min, where U = -0.1.
   auto p = copies(fixtures::unit1(), 10, 1, 0.0);
   p.delta.reset();
   p.epsilon = 0.1;
   try {
      (void)allocate(p);
      FAIL();
   } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::nonpositive_lower_bound);
   }
}

TEST(Allocate, RequiresStep) {
   auto p = copies(fixtures::unit1(), 1, 1, 0.0);
   EXPECT_THROW((void)allocate(p), Error);
   p.delta.reset();
   EXPECT_THROW((void)allocate(p), Error);
}

TEST(BudgetDp, SmallTableByHand) {
   // Two items, budget 3: best is (1, 2) with 5 + 7 = 12.
   const std::vector<std::vector<double>> gains{{0, 5, 6, 6.5}, {0, 4, 7}};
   const BudgetDpResult r = solve_budget_dp(gains, 3);
   EXPECT_DOUBLE_EQ(r.value, 12.0);
   EXPECT_EQ(r.steps, (std::vector<std::size_t>{1, 2}));
}

TEST(BudgetDpProperty, RowsNondecreasing) {
   std::mt19937_64 rng(51);
   for (int trial = 0; trial < 20; ++trial) {
      std::vector<AgentSpec> agents;
      for (int l = 0; l < 4; ++l) {
         auto a = fixtures::random_agent(rng, 5);
         a.alpha = 0.0;
         agents.push_back(a);
      }
      const auto curves = build_utility_curves(agents);
      double need = 0.0;
      for (const auto& c : curves) {
         need += c.beta_min();
      }
      if (need > 2.0) {
         continue;
      }
      const double delta = 0.01;
      const auto steps = static_cast<std::size_t>((2.0 - need) / delta);
      std::vector<std::vector<double>> gains(curves.size());
      for (std::size_t l = 0; l < curves.size(); ++l) {
         for (std::size_t e = 0; e <= steps; ++e) {
            gains[l].push_back(curves[l](curves[l].beta_min() + e * delta) - curves[l](curves[l].beta_min()));
         }
      }
      (void)solve_budget_dp(gains, steps, [](std::size_t, std::span<const double> row) {
         for (std::size_t j = 1; j < row.size(); ++j) {
            ASSERT_GE(row[j], row[j - 1]);
         }
      });
   }
}

TEST(AllocateProperty, MatchesBruteForceAndStaysFeasible) {
   std::mt19937_64 rng(52);
   int checked = 0;
   for (int trial = 0; trial < 60; ++trial) {
      std::uniform_int_distribution<int> mdist(1, 3);
      const int m = mdist(rng);
      std::vector<AgentSpec> agents;
      for (int l = 0; l < m; ++l) {
         agents.push_back(fixtures::random_agent(rng, 4));
      }
      for (int budget : {1, 2}) {
         AllocationProblem p{agents, budget, 0.01, std::nullopt};
         try {
            const Allocation dp = allocate(p);
            const Allocation bf = brute_force_allocate(p, 0.01);
            ASSERT_GE(dp.total_utility, bf.total_utility - 1e-9);
            ASSERT_LE(cap_sum(dp), budget + 1e-9);
            for (std::size_t l = 0; l < dp.agents.size(); ++l) {
               const auto& x = dp.agents[l];
               ASSERT_GE(x.effective.contract.beta, x.beta_min - 1e-12);
               ASSERT_LE(x.effective.contract.beta, x.cap + 1e-12);
               ASSERT_TRUE(check_ic_ir(agents[l], x.effective.contract, {x.effective.action, true}, 1e-9));
            }
            ++checked;
         } catch (const Error& e) {
            ASSERT_EQ(e.code(), Errc::infeasible_budget);
         }
      }
   }
   EXPECT_GT(checked, 50);
}

TEST(AllocateProperty, MoreBudgetNeverHurts) {
   std::mt19937_64 rng(53);
   for (int trial = 0; trial < 30; ++trial) {
      std::vector<AgentSpec> agents;
      for (int l = 0; l < 5; ++l) {
         agents.push_back(fixtures::random_agent(rng, 4));
      }
      double prev = -std::numeric_limits<double>::infinity();
      for (int budget = 1; budget <= 5; ++budget) {
         try {
            const Allocation a = allocate(AllocationProblem{agents, budget, 0.01, std::nullopt});
            ASSERT_GE(a.total_utility, prev - 1e-9);
            prev = a.total_utility;
         } catch (const Error& e) {
            ASSERT_EQ(e.code(), Errc::infeasible_budget);
         }
      }
   }
}

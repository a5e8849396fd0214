#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "safe_contract/oracle.hpp"

using namespace safe_contract;

TEST(Oracle, SingleAgentGrid) {
   const OracleSolution o = brute_force_single(fixtures::unit1(), 1e-3);
   EXPECT_NEAR(o.utility, 20.0 / 3.0, 2e-2);
   EXPECT_TRUE(o.choice.safe);
}

TEST(Oracle, NoSafetyCost) {
   const OracleSolution o = brute_force_single(fixtures::unit1(1.0, 0.0), 1e-3);
   EXPECT_NEAR(o.contract.gamma, 0.2, 1e-3);
   EXPECT_EQ(o.contract.beta, 0.0);
}

TEST(Oracle, NoSafeContract) {
   try {
      (void)brute_force_single(fixtures::unit1(1.0, 9.0), 1e-2);
      FAIL();
   } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::no_safe_contract);
   }
}

TEST(Oracle, RejectsBadStep) {
   EXPECT_THROW((void)brute_force_single(fixtures::unit1(), 0.0), Error);
}

TEST(Oracle, IcIr) {
   const auto agent = fixtures::unit1();
   EXPECT_TRUE(check_ic_ir(agent, {0.3, 1.0 / 3.0}, {0, true}));
   EXPECT_FALSE(check_ic_ir(agent, {0.3, 0.2}, {0, true}));
   const auto six = fixtures::six_action_agent();
   EXPECT_TRUE(check_ic_ir(six, {1.0, 1.0}, {5, true}));
   EXPECT_FALSE(check_ic_ir(six, {1.0, 1.0}, {9, true}));
}

TEST(OracleAllocate, SingleAgentMatchesSingleGrid) {
   AllocationProblem p{{fixtures::unit1()}, 1, 0.01, std::nullopt};
   const Allocation a = brute_force_allocate(p, 0.01);
   EXPECT_NEAR(a.total_utility, brute_force_single(fixtures::unit1(), 1e-3).utility, 2e-2);
}

TEST(OracleAllocate, TwoAgentsSlackBudget) {
   AllocationProblem p{{fixtures::unit1(), fixtures::unit1()}, 2, 0.01, std::nullopt};
   EXPECT_NEAR(brute_force_allocate(p, 0.01).total_utility, 40.0 / 3.0, 1e-9);
}

TEST(OracleAllocate, ThreeAgentsBindingBudget) {
   AllocationProblem p{{fixtures::unit1(), fixtures::unit1(), fixtures::unit1()}, 1, 0.01, std::nullopt};
   const Allocation a = brute_force_allocate(p, 0.01);
   // Caps live on beta_min + k * 0.01, so at most two agents reach 0.33 and one 1/3.
   EXPECT_NEAR(a.total_utility, 20.0, 0.06);
   double sum = 0.0;
   for (const auto& x : a.agents) {
      sum += x.cap;
   }
   EXPECT_LE(sum, 1.0 + 1e-12);
}

TEST(OracleAllocate, TooManyAgents) {
   AllocationProblem p{std::vector<AgentSpec>(4, fixtures::unit1()), 2, 0.01, std::nullopt};
   EXPECT_THROW((void)brute_force_allocate(p, 0.01), Error);
}

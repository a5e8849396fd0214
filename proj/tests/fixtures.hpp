#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "safe_contract/safe_contract.hpp"

namespace fixtures {

using safe_contract::Action;
using safe_contract::AgentSpec;

inline AgentSpec unit1(double kappa_i = 1.0, double kappa_s = 1.0, double alpha = 0.0) {
   return AgentSpec{{{10.0, 2.0}}, kappa_s, kappa_i, alpha};
}

inline std::vector<Action> six_actions() {
   return {{2, 1}, {3, 1.2}, {7, 2.1}, {9, 3.1}, {11, 4.8}, {13, 6.6}};
}

inline AgentSpec six_action_agent(double alpha = 0.0) { return AgentSpec{six_actions(), 1.0, 1.0, alpha}; }

inline std::vector<Action> statics_actions() {
   return {{1.5, 1}, {3, 1.3}, {4, 1.5}, {6, 2.5}, {7, 3.4}, {9, 5.2}};
}

/// Random agent with 1..max_n actions satisfying the ordering and safety-feasibility
/// assumptions. Rewards and costs are increasing; kappa_s stays below the best surplus.
inline AgentSpec random_agent(std::mt19937_64& rng, std::size_t max_n = 8) {
   std::uniform_int_distribution<std::size_t> count(1, max_n);
   std::uniform_real_distribution<double> u01(0.0, 1.0);
   for (;;) {
      const std::size_t n = count(rng);
      AgentSpec a;
      double r = 0.5 + 2.0 * u01(rng);
      double c = 0.2 * u01(rng);
      for (std::size_t i = 0; i < n; ++i) {
         a.actions.push_back({r, c});
         r += 0.2 + 3.0 * u01(rng);
         c += 0.05 + 1.5 * u01(rng);
      }
      const double surplus = a.max_surplus();
      if (surplus <= 0.05) {
         continue;
      }
      a.kappa_s = surplus * (0.05 + 0.85 * u01(rng));
      a.kappa_i = 0.1 + 10.0 * u01(rng);
      a.alpha = 0.3 * u01(rng);
      return a;
   }
}

/// Pointwise max over all lines, the definition of the envelope.
inline double max_line(const std::vector<Action>& actions, double gamma) {
   double best = actions.front().utility(gamma);
   for (const Action& a : actions) {
      best = std::max(best, a.utility(gamma));
   }
   return best;
}

/// Largest gamma with max_line(gamma) <= y, by bisection on [0, hi].
inline double bisect_inverse(const std::vector<Action>& actions, double y, double hi = 10.0) {
   double lo = 0.0;
   for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (max_line(actions, mid) <= y ? lo : hi) = mid;
   }
   return lo;
}

/// beta(gamma) from its defining formula, with the inverse found by bisection.
inline double beta_reference(const AgentSpec& agent, double gamma) {
   const double shadow = bisect_inverse(agent.actions, max_line(agent.actions, gamma) - agent.kappa_s);
   return std::max(1.0 - shadow / (gamma * (1.0 - agent.alpha)), 0.0);
}

} // namespace fixtures

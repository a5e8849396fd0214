#pragma once

// Allocation of a budget of B inspectors across agents.
//
//    max sum_l U_l(beta_bar_l)   s.t.  sum_l beta_bar_l <= B
//
// Each agent first receives its minimum beta_min_l; the extra x_l = beta_bar_l -
// beta_min_l is restricted to multiples of delta and the resulting multiple-choice
// knapsack is solved by the recursion
//
//    V(l, j) = max_{eta <= min(j, cap_l)} V(l-1, j-eta) + U_l(beta_min_l + eta delta) - U_l(beta_min_l).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safe_contract/agent.hpp"
#include "safe_contract/error.hpp"
#include "safe_contract/utility_curve.hpp"

namespace safe_contract {

struct AllocationProblem {
   std::vector<AgentSpec> agents;
   int budget = 1;
   std::optional<double> delta;   // grid step
   std::optional<double> epsilon; // relative target, used when delta is absent
};

struct AgentAllocation {
   double beta_min = 0.0;
   double beta_cap = 0.0;
   std::size_t grid_steps = 0; // x = grid_steps * delta
   double cap = 0.0;           // beta_bar, never above beta_cap
   EffectiveContract effective;
};

struct Allocation {
   std::vector<AgentAllocation> agents;
   double delta = 0.0;
   double total_utility = 0.0;
   double gap_bound = 0.0;
};

/// Discretisation loss bound delta * sum_l max(R_n^2 / kappa_s - kappa_i, 0).
/// Agents with kappa_s = 0 have a single-point utility curve and contribute 0.
inline double gap_bound(std::span<const AgentSpec> agents, double delta) {
   if (delta <= 0.0) {
      return 0.0;
   }
   double lipschitz = 0.0;
   for (const AgentSpec& a : agents) {
      if (a.kappa_s <= 0.0) {
         continue;
      }
      const double rn = a.max_reward();
      lipschitz += std::max(rn * rn / a.kappa_s - a.kappa_i, 0.0);
   }
   return delta * lipschitz;
}

inline double gap_bound(const AllocationProblem& problem, double delta) { return gap_bound(problem.agents, delta); }

/// Table-filling part of the allocation, kept separate so it can be checked on its own.
/// gains[l][eta] is the utility gained by giving agent l eta extra grid steps; gains[l][0]
/// must be 0. Returns the chosen eta per agent and V(m, J).
struct BudgetDpResult {
   std::vector<std::size_t> steps;
   double value = 0.0;
};

using DpRowObserver = std::function<void(std::size_t row, std::span<const double> values)>;

inline BudgetDpResult solve_budget_dp(const std::vector<std::vector<double>>& gains, std::size_t budget_steps,
                                      const DpRowObserver& observer = {}) {
   const std::size_t m = gains.size();
   std::vector<double> prev(budget_steps + 1, 0.0);
   std::vector<double> cur(budget_steps + 1, 0.0);
   std::vector<std::vector<std::uint32_t>> choice(m, std::vector<std::uint32_t>(budget_steps + 1, 0));

   for (std::size_t l = 0; l < m; ++l) {
      const auto& g = gains[l];
      const std::size_t cap = g.empty() ? 0 : g.size() - 1;
      for (std::size_t j = 0; j <= budget_steps; ++j) {
         double best = prev[j];
         std::uint32_t arg = 0;
         const std::size_t top = std::min(j, cap);
         for (std::size_t eta = 1; eta <= top; ++eta) {
            const double v = prev[j - eta] + g[eta];
            if (v > best) {
               best = v;
               arg = static_cast<std::uint32_t>(eta);
            }
         }
         cur[j] = best;
         choice[l][j] = arg;
      }
      if (observer) {
         observer(l, cur);
      }
      std::swap(prev, cur);
   }

   BudgetDpResult result;
   result.value = prev[budget_steps];
   result.steps.assign(m, 0);
   std::size_t j = budget_steps;
   for (std::size_t l = m; l-- > 0;) {
      result.steps[l] = choice[l][j];
      j -= choice[l][j];
   }
   return result;
}

namespace detail {

inline double sum_beta_min(const std::vector<UtilityCurve>& curves) {
   double s = 0.0;
   for (const auto& c : curves) {
      s += c.beta_min();
   }
   return s;
}

inline void require_budget(const std::vector<UtilityCurve>& curves, int budget) {
   const double need = sum_beta_min(curves);
   if (need > static_cast<double>(budget) + 1e-12) {
      throw Error(Errc::infeasible_budget, "sum of minimum inspections " + std::to_string(need) +
                                                 " exceeds the budget " + std::to_string(budget));
   }
}

} // namespace detail

/// Converts a relative target epsilon into a grid step using U_1(B - sum_{l>=2} beta_min_l)
/// as the lower bound on the optimum.
inline double delta_from_epsilon(const std::vector<AgentSpec>& agents, const std::vector<UtilityCurve>& curves,
                                 int budget, double epsilon) {
   if (!(epsilon > 0.0)) {
      throw Error(Errc::invalid_input, "epsilon must be positive");
   }
   double lipschitz = 0.0;
   for (const AgentSpec& a : agents) {
      if (a.kappa_s > 0.0) {
         lipschitz = std::max(lipschitz, a.max_reward() * a.max_reward() / a.kappa_s);
      }
   }
   if (lipschitz <= 0.0) {
      return 1.0; // every utility curve is a single point
   }
   double rest = 0.0;
   for (std::size_t l = 1; l < curves.size(); ++l) {
      rest += curves[l].beta_min();
   }
   const double lower = curves.front()(static_cast<double>(budget) - rest);
   if (!(lower > 0.0)) {
      throw Error(Errc::nonpositive_lower_bound,
                  "lower bound " + std::to_string(lower) + " on the optimum is not positive; pass delta directly");
   }
   return epsilon * lower / (static_cast<double>(agents.size()) * lipschitz);
}

inline Allocation allocate(const AllocationProblem& problem, const std::vector<UtilityCurve>& curves) {
   if (problem.agents.empty()) {
      throw Error(Errc::invalid_input, "allocation needs at least one agent");
   }
   if (problem.budget <= 0) {
      throw Error(Errc::invalid_input, "budget must be a positive integer");
   }
   detail::require_budget(curves, problem.budget);

   double delta = 0.0;
   if (problem.delta) {
      delta = *problem.delta;
      if (!(delta > 0.0)) {
         throw Error(Errc::invalid_input, "delta must be positive");
      }
   } else if (problem.epsilon) {
      delta = delta_from_epsilon(problem.agents, curves, problem.budget, *problem.epsilon);
   } else {
      throw Error(Errc::invalid_input, "either delta or epsilon is required");
   }

   const double spare = std::max(0.0, static_cast<double>(problem.budget) - detail::sum_beta_min(curves));
   const auto budget_steps = static_cast<std::size_t>(std::floor(spare / delta + 1e-9));

   std::vector<std::vector<double>> gains(curves.size());
   for (std::size_t l = 0; l < curves.size(); ++l) {
      const UtilityCurve& c = curves[l];
      const double span = c.beta_cap() - c.beta_min();
      // Past beta_cap the curve is flat, so one step beyond covers it.
      const auto steps = std::min(budget_steps, static_cast<std::size_t>(std::ceil(span / delta - 1e-9)));
      const double base = c(c.beta_min());
      gains[l].resize(steps + 1);
      for (std::size_t eta = 0; eta <= steps; ++eta) {
         const double beta = std::min(c.beta_min() + static_cast<double>(eta) * delta, c.beta_cap());
         gains[l][eta] = c(beta) - base;
      }
   }

   const BudgetDpResult dp = solve_budget_dp(gains, budget_steps);

   Allocation out;
   out.delta = delta;
   out.gap_bound = gap_bound(problem, delta);
   for (std::size_t l = 0; l < curves.size(); ++l) {
      const UtilityCurve& c = curves[l];
      AgentAllocation a;
      a.beta_min = c.beta_min();
      a.beta_cap = c.beta_cap();
      a.grid_steps = dp.steps[l];
      a.cap = std::min(c.beta_min() + static_cast<double>(a.grid_steps) * delta, c.beta_cap());
      a.effective = c.effective(a.cap);
      out.total_utility += a.effective.utility;
      out.agents.push_back(a);
   }
   return out;
}

inline std::vector<UtilityCurve> build_utility_curves(std::span<const AgentSpec> agents) {
   std::vector<UtilityCurve> curves;
   curves.reserve(agents.size());
   for (const AgentSpec& a : agents) {
      curves.push_back(build_utility_curve(a));
   }
   return curves;
}

inline Allocation allocate(const AllocationProblem& problem) {
   return allocate(problem, build_utility_curves(problem.agents));
}

} // namespace safe_contract

#pragma once

// Brute-force reference solvers. These only use the agent model (best response
// and principal utility) and plain enumeration, never the envelope or beta-curve
// machinery they are meant to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "safe_contract/agent.hpp"
#include "safe_contract/allocation.hpp"
#include "safe_contract/error.hpp"
#include "safe_contract/utility_curve.hpp"

namespace safe_contract {

struct OracleSolution {
   Contract contract;
   Choice choice;
   double utility = -std::numeric_limits<double>::infinity();
};

/// IC and IR for `intended` under `contract`, with `slack` of numerical room.
inline bool check_ic_ir(const AgentSpec& agent, const Contract& contract, Choice intended, double slack = 1e-12) {
   if (intended.action >= agent.actions.size()) {
      return false;
   }
   const double u = agent_utility(agent, contract, intended);
   if (u < -slack) {
      return false;
   }
   for (std::size_t i = 0; i < agent.actions.size(); ++i) {
      for (bool safe : {true, false}) {
         if (agent_utility(agent, contract, {i, safe}) > u + slack) {
            return false;
         }
      }
   }
   return true;
}

namespace detail {

// Kinks of the agent's problem found by pairwise enumeration: where two lines cross
// and where each safe action clears participation.
inline std::vector<double> oracle_extra_gammas(const AgentSpec& agent) {
   std::vector<double> out;
   const auto& acts = agent.actions;
   if (acts.size() > 64) {
      return out;
   }
   auto keep = [&](double g) {
      if (g >= 0.0 && g <= 1.0) {
         out.push_back(g);
      }
   };
   for (std::size_t i = 0; i < acts.size(); ++i) {
      if (acts[i].reward > 0.0) {
         keep((acts[i].cost + agent.kappa_s) / acts[i].reward);
      }
      for (std::size_t j = i + 1; j < acts.size(); ++j) {
         keep((acts[j].cost - acts[i].cost) / (acts[j].reward - acts[i].reward));
      }
   }
   return out;
}

} // namespace detail

/// Enumerates (gamma, beta) on a step grid over [0,1]^2 (plus pairwise kinks in gamma)
/// and returns the best pair whose best response is a safe action.
inline OracleSolution brute_force_single(const AgentSpec& agent, double step) {
   if (!(step > 0.0)) {
      throw Error(Errc::invalid_input, "grid step must be positive");
   }
   validate(agent);
   const auto cells = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
   std::vector<double> gammas;
   gammas.reserve(cells + 1);
   for (std::size_t k = 0; k <= cells; ++k) {
      gammas.push_back(std::min(1.0, static_cast<double>(k) * step));
   }
   for (double g : detail::oracle_extra_gammas(agent)) {
      gammas.push_back(g);
   }

   std::optional<OracleSolution> best;
   for (double gamma : gammas) {
      // Implementability is monotone in beta and the principal pays for beta, so the
      // first safe beta on the grid is the best one for this gamma.
      for (std::size_t k = 0; k <= cells; ++k) {
         const Contract c{gamma, std::min(1.0, static_cast<double>(k) * step)};
         const Response r = agent_best_response(agent, c);
         if (!r) {
            break; // every safe option is negative here, and beta cannot change that
         }
         if (!r->safe) {
            continue;
         }
         const double u = principal_utility(agent, c, r);
         if (!best || u > best->utility) {
            best = OracleSolution{c, *r, u};
         }
         break;
      }
   }
   if (!best) {
      throw Error(Errc::no_safe_contract, "no grid contract implements a safe action");
   }
   return *best;
}

/// Exhaustive search over grid caps beta_min_l + k * step (capped at beta_cap_l) with
/// total extra steps within the spare budget. Limited to three agents. The last agent
/// always takes as many steps as remain, which is optimal since U_l is nondecreasing.
inline Allocation brute_force_allocate(const AllocationProblem& problem, double step) {
   const std::size_t m = problem.agents.size();
   if (m == 0 || m > 3) {
      throw Error(Errc::invalid_input, "brute-force allocation supports 1 to 3 agents");
   }
   if (!(step > 0.0)) {
      throw Error(Errc::invalid_input, "grid step must be positive");
   }
   const std::vector<UtilityCurve> curves = build_utility_curves(problem.agents);
   double need = 0.0;
   for (const auto& c : curves) {
      need += c.beta_min();
   }
   if (need > static_cast<double>(problem.budget) + 1e-12) {
      throw Error(Errc::infeasible_budget, "sum of minimum inspections exceeds the budget");
   }
   const auto budget_steps =
      static_cast<std::size_t>(std::floor(std::max(0.0, problem.budget - need) / step + 1e-9));

   std::vector<std::size_t> limit(m);
   for (std::size_t l = 0; l < m; ++l) {
      const double span = curves[l].beta_cap() - curves[l].beta_min();
      limit[l] = std::min(budget_steps, static_cast<std::size_t>(std::ceil(span / step - 1e-9)));
   }
   auto cap_of = [&](std::size_t l, std::size_t k) {
      return std::min(curves[l].beta_min() + static_cast<double>(k) * step, curves[l].beta_cap());
   };

   std::vector<std::size_t> pick(m, 0);
   std::vector<std::size_t> best_pick(m, 0);
   double best = -std::numeric_limits<double>::infinity();
   auto finish = [&](std::size_t used) {
      pick[m - 1] = std::min(limit[m - 1], budget_steps - used);
      double total = 0.0;
      for (std::size_t l = 0; l < m; ++l) {
         total += curves[l](cap_of(l, pick[l]));
      }
      if (total > best) {
         best = total;
         best_pick = pick;
      }
   };
   if (m == 1) {
      finish(0);
   } else if (m == 2) {
      for (std::size_t a = 0; a <= limit[0]; ++a) {
         pick[0] = a;
         finish(a);
      }
   } else {
      for (std::size_t a = 0; a <= limit[0]; ++a) {
         for (std::size_t b = 0; b <= limit[1] && a + b <= budget_steps; ++b) {
            pick[0] = a;
            pick[1] = b;
            finish(a + b);
         }
      }
   }

   Allocation out;
   out.delta = step;
   out.gap_bound = gap_bound(problem, step);
   for (std::size_t l = 0; l < m; ++l) {
      AgentAllocation a;
      a.beta_min = curves[l].beta_min();
      a.beta_cap = curves[l].beta_cap();
      a.grid_steps = best_pick[l];
      a.cap = cap_of(l, best_pick[l]);
      a.effective = curves[l].effective(a.cap);
      out.total_utility += a.effective.utility;
      out.agents.push_back(a);
   }
   return out;
}

} // namespace safe_contract

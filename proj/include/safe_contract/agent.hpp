#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "safe_contract/envelope.hpp"
#include "safe_contract/error.hpp"

namespace safe_contract {

/// One agent: its effort levels plus the safety and inspection parameters.
struct AgentSpec {
   std::vector<Action> actions; // sorted by cost ascending
   double kappa_s = 0.0;        // agent's cost of complying with safety measures
   double kappa_i = 1.0;        // principal's cost per inspection
   double alpha = 0.0;          // side-effect probability when unsafe, in [0, 1)

   [[nodiscard]] double max_reward() const { return actions.back().reward; }

   /// max_i (R_i - c_i): the agent's best surplus when paid the whole reward.
   [[nodiscard]] double max_surplus() const {
      double best = -std::numeric_limits<double>::infinity();
      for (const Action& a : actions) {
         best = std::max(best, a.reward - a.cost);
      }
      return best;
   }

   /// True when some safe action can be implemented at all.
   [[nodiscard]] bool safety_feasible() const { return max_surplus() > kappa_s; }
};

/// Checks field ranges and the action ordering. Safety feasibility is checked by
/// the solvers (InfeasibleSafety), since sweeps need to report it per row.
inline void validate(const AgentSpec& agent) {
   if (agent.actions.empty()) {
      throw Error(Errc::invalid_input, "agent has no actions");
   }
   for (std::size_t i = 0; i < agent.actions.size(); ++i) {
      const Action& a = agent.actions[i];
      if (!std::isfinite(a.reward) || !std::isfinite(a.cost) || a.reward < 0.0 || a.cost < 0.0) {
         throw Error(Errc::invalid_input,
                     "action " + std::to_string(i + 1) + " needs finite nonnegative reward and cost");
      }
   }
   for (std::size_t i = 1; i < agent.actions.size(); ++i) {
      const Action& a = agent.actions[i - 1];
      const Action& b = agent.actions[i];
      if (!(b.cost > a.cost) || !(b.reward > a.reward)) {
         throw Error(Errc::degenerate_input,
                     "actions " + std::to_string(i) + " and " + std::to_string(i + 1) +
                        " violate the ordering assumption (costs and rewards must be distinct and "
                        "a higher cost must come with a higher reward)");
      }
   }
   if (!std::isfinite(agent.kappa_s) || agent.kappa_s < 0.0) {
      throw Error(Errc::invalid_input, "kappa_s must be finite and >= 0");
   }
   if (!std::isfinite(agent.kappa_i) || !(agent.kappa_i > 0.0)) {
      throw Error(Errc::invalid_input, "kappa_i must be finite and > 0");
   }
   if (!std::isfinite(agent.alpha) || agent.alpha < 0.0 || agent.alpha >= 1.0) {
      throw Error(Errc::invalid_input, "alpha must lie in [0, 1)");
   }
}

inline void require_safety_feasible(const AgentSpec& agent) {
   if (!agent.safety_feasible()) {
      throw Error(Errc::infeasible_safety,
                  "safety-feasibility assumption violated: max_i(R_i - c_i) = " +
                     std::to_string(agent.max_surplus()) + " does not exceed kappa_s = " +
                     std::to_string(agent.kappa_s) + ", so no safe action is implementable");
   }
}

/// A linear contract: pay gamma * reward, inspect with probability beta.
struct Contract {
   double gamma = 0.0;
   double beta = 0.0;
};

/// The agent's choice: an action index (0-based) and whether it complies with safety.
struct Choice {
   std::size_t action = 0;
   bool safe = true;

   friend bool operator==(const Choice&, const Choice&) = default;
};

/// Best response; std::nullopt means the agent rejects the contract.
using Response = std::optional<Choice>;

/// Agent's expected utility for (action, safety) under the contract.
inline double agent_utility(const AgentSpec& agent, const Contract& contract, Choice choice) {
   const Action& a = agent.actions.at(choice.action);
   if (choice.safe) {
      return contract.gamma * a.reward - a.cost - agent.kappa_s;
   }
   return (1.0 - contract.beta) * (1.0 - agent.alpha) * contract.gamma * a.reward - a.cost;
}

/// Argmax over all 2n (action, safety) pairs plus the outside option. Utilities
/// within `tol` of the maximum count as ties; ties go to the safe choice, then to
/// the higher-reward action. A maximum below -tol means rejection.
inline Response agent_best_response(const AgentSpec& agent, const Contract& contract,
                                    double tol = kTolerance) {
   double best = -std::numeric_limits<double>::infinity();
   for (std::size_t i = 0; i < agent.actions.size(); ++i) {
      best = std::max(best, agent_utility(agent, contract, {i, true}));
      best = std::max(best, agent_utility(agent, contract, {i, false}));
   }
   if (best < -tol) {
      return std::nullopt;
   }
   for (bool safe : {true, false}) {
      for (std::size_t i = agent.actions.size(); i-- > 0;) {
         if (agent_utility(agent, contract, {i, safe}) >= best - tol) {
            return Choice{i, safe};
         }
      }
   }
   return std::nullopt; // unreachable
}

/// Principal's expected utility: (1-gamma) R_i - beta kappa_i for a safe response,
/// -inf for an unsafe one, 0 when the agent rejects.
inline double principal_utility(const AgentSpec& agent, const Contract& contract, const Response& response) {
   if (!response) {
      return 0.0;
   }
   if (!response->safe) {
      return -std::numeric_limits<double>::infinity();
   }
   return (1.0 - contract.gamma) * agent.actions.at(response->action).reward - contract.beta * agent.kappa_i;
}

/// Sufficient condition under which beta = 0 cannot implement any safe action:
/// alpha < kappa_s / R_n. Returns false when kappa_s = 0.
inline bool needs_inspection(const AgentSpec& agent) {
   if (agent.kappa_s <= 0.0) {
      return false;
   }
   return agent.alpha * agent.max_reward() < agent.kappa_s;
}

} // namespace safe_contract

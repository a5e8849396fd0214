#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safe_contract/agent.hpp"
#include "safe_contract/beta_curve.hpp"
#include "safe_contract/error.hpp"

namespace safe_contract {

struct SingleSolution {
   Contract contract;
   std::size_t action = 0; // implemented safe action (0-based)
   double utility = 0.0;   // principal's expected utility
};

namespace detail {

inline SingleSolution evaluate_candidate(const AgentSpec& agent, const BetaPiece& piece, double gamma) {
   SingleSolution s;
   s.contract.gamma = gamma;
   s.contract.beta = piece.eval(gamma);
   s.action = piece.owner;
   s.utility = (1.0 - gamma) * agent.actions[piece.owner].reward - s.contract.beta * agent.kappa_i;
   return s;
}

// Higher utility wins; near-ties go to the smaller beta, then the smaller gamma.
inline bool better(const SingleSolution& a, const SingleSolution& b) {
   constexpr double tie = 1e-12;
   if (a.utility > b.utility + tie) {
      return true;
   }
   if (a.utility < b.utility - tie) {
      return false;
   }
   if (a.contract.beta != b.contract.beta) {
      return a.contract.beta < b.contract.beta;
   }
   return a.contract.gamma < b.contract.gamma;
}

} // namespace detail

/// Optimal linear contract for a single agent given its beta curve.
///
/// On every piece the principal's utility (1 - gamma) R_owner - beta(gamma) kappa_i
/// is concave, so the optimum is either a piece endpoint or the stationary point
/// gamma = sqrt(kappa_i * scale / R_owner). On clamped pieces the utility falls
/// with gamma and the left endpoint wins.
inline SingleSolution solve_single(const AgentSpec& agent, const BetaCurve& curve) {
   std::optional<SingleSolution> best;
   auto offer = [&](const SingleSolution& s) {
      if (!best || detail::better(s, *best)) {
         best = s;
      }
   };

   const auto& pieces = curve.pieces();
   for (std::size_t k = 0; k < pieces.size(); ++k) {
      const BetaPiece& piece = pieces[k];
      offer(detail::evaluate_candidate(agent, piece, piece.lo));
      if (k + 1 == pieces.size()) {
         offer(detail::evaluate_candidate(agent, piece, piece.hi));
      }
      if (piece.clamped) {
         continue;
      }
      const double owner_reward = agent.actions[piece.owner].reward;
      const double stationary = std::sqrt(agent.kappa_i * piece.scale / owner_reward);
      if (stationary > piece.lo && stationary < piece.hi) {
         offer(detail::evaluate_candidate(agent, piece, stationary));
      }
   }
   if (!best) {
      throw Error(Errc::internal, "beta curve has no pieces");
   }
   return *best;
}

inline SingleSolution solve_single(const AgentSpec& agent) { return solve_single(agent, build_beta_curve(agent)); }

enum class SweepParam { kappa_i, kappa_s, alpha };

struct SweepRow {
   double value = 0.0;
   std::optional<SingleSolution> solution; // empty when the row is infeasible or invalid
   std::string error;
};

inline AgentSpec with_param(AgentSpec agent, SweepParam which, double value) {
   switch (which) {
      case SweepParam::kappa_i: agent.kappa_i = value; break;
      case SweepParam::kappa_s: agent.kappa_s = value; break;
      case SweepParam::alpha: agent.alpha = value; break;
   }
   return agent;
}

/// Re-solves the agent for each grid value, in grid order. Failures are reported
/// per row instead of aborting the sweep.
inline std::vector<SweepRow> sweep_parameter(const AgentSpec& agent, SweepParam which,
                                             std::span<const double> grid) {
   std::vector<SweepRow> rows;
   rows.reserve(grid.size());
   for (double value : grid) {
      SweepRow row;
      row.value = value;
      try {
         row.solution = solve_single(with_param(agent, which, value));
      } catch (const Error& e) {
         row.error = e.what();
      }
      rows.push_back(std::move(row));
   }
   return rows;
}

} // namespace safe_contract

#pragma once

// Principal's best utility from one agent when its inspection probability is
// capped at beta_bar:
//
//    U(beta_bar) = max_{beta <= beta_bar} U(gamma(beta), beta),
//
// where gamma(beta) inverts the beta curve. On an unclamped beta piece
// beta = base + scale / gamma, so gamma(beta) = scale / (beta - base) and
//
//    U(gamma(beta), beta) = (1 - scale / (beta - base)) R_owner - beta kappa_i,
//
// which is concave in beta. The running max therefore alternates between
// flat stretches and rising concave stretches.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "safe_contract/agent.hpp"
#include "safe_contract/beta_curve.hpp"
#include "safe_contract/error.hpp"
#include "safe_contract/single_agent.hpp"

namespace safe_contract {

/// Contract that attains U(beta_bar) with effective inspection beta <= beta_bar.
struct EffectiveContract {
   Contract contract;
   std::size_t action = 0;
   double utility = 0.0;
};

struct UtilitySegment {
   double beta_lo = 0.0;
   double beta_hi = 0.0;
   bool flat = true;

   // flat: the constant value and where it is attained
   EffectiveContract argmax;

   // rising: parameters of the underlying beta piece
   double base = 0.0;
   double scale = 0.0;
   double reward = 0.0;
   double kappa_i = 0.0;
   std::size_t action = 0;

   [[nodiscard]] double gamma_of(double beta) const { return scale / (beta - base); }

   [[nodiscard]] double value(double beta) const {
      if (flat) {
         return argmax.utility;
      }
      return (1.0 - gamma_of(beta)) * reward - beta * kappa_i;
   }

   [[nodiscard]] EffectiveContract effective(double beta) const {
      if (flat) {
         return argmax;
      }
      return {{gamma_of(beta), beta}, action, value(beta)};
   }
};

class UtilityCurve {
public:
   [[nodiscard]] double beta_min() const noexcept { return beta_min_; }
   [[nodiscard]] double beta_cap() const noexcept { return beta_cap_; }
   [[nodiscard]] const std::vector<UtilitySegment>& segments() const noexcept { return segments_; }
   [[nodiscard]] const EffectiveContract& top() const noexcept { return top_; }

   [[nodiscard]] const EffectiveContract& bottom() const noexcept { return bottom_; }

   [[nodiscard]] double operator()(double beta_bar) const { return effective(beta_bar).utility; }

   [[nodiscard]] EffectiveContract effective(double beta_bar) const {
      if (beta_bar < beta_min_ - 1e-12) {
         throw Error(Errc::below_min_inspection, "cap " + std::to_string(beta_bar) +
                                                       " is below the minimum inspection " +
                                                       std::to_string(beta_min_));
      }
      if (beta_bar >= beta_cap_) {
         return top_;
      }
      if (segments_.empty() || beta_bar <= beta_min_) {
         return bottom_;
      }
      auto it = std::upper_bound(segments_.begin(), segments_.end(), beta_bar,
                                 [](double b, const UtilitySegment& s) { return b < s.beta_lo; });
      const UtilitySegment& seg = *(it == segments_.begin() ? it : std::prev(it));
      return seg.effective(beta_bar);
   }

private:
   friend UtilityCurve build_utility_curve(const AgentSpec& agent, const BetaCurve& curve);

   double beta_min_ = 0.0;
   double beta_cap_ = 0.0;
   std::vector<UtilitySegment> segments_;
   EffectiveContract top_;
   EffectiveContract bottom_;
};

inline UtilityCurve build_utility_curve(const AgentSpec& agent, const BetaCurve& curve) {
   UtilityCurve out;
   const auto& pieces = curve.pieces();

   // Best contract with beta == 0: left endpoints of clamped pieces (utility falls
   // inside a clamped piece and only jumps up where the owner changes).
   bool have_running = false;
   EffectiveContract running;
   for (const BetaPiece& piece : pieces) {
      if (!piece.clamped) {
         continue;
      }
      const double u = (1.0 - piece.lo) * agent.actions[piece.owner].reward;
      if (!have_running || u > running.utility + 1e-12) {
         running = {{piece.lo, 0.0}, piece.owner, u};
         have_running = true;
      }
   }

   out.beta_min_ = curve(1.0);
   out.beta_cap_ = curve(curve.gamma_ir());
   if (have_running) {
      out.bottom_ = running;
   }

   auto emit_flat = [&](double lo, double hi) {
      if (hi <= lo) {
         return;
      }
      UtilitySegment seg;
      seg.beta_lo = lo;
      seg.beta_hi = hi;
      seg.flat = true;
      seg.argmax = running;
      if (!out.segments_.empty() && out.segments_.back().flat &&
          out.segments_.back().argmax.utility == running.utility) {
         out.segments_.back().beta_hi = hi;
         return;
      }
      out.segments_.push_back(seg);
   };

   // Unclamped pieces in order of increasing beta (decreasing gamma).
   for (std::size_t k = pieces.size(); k-- > 0;) {
      const BetaPiece& piece = pieces[k];
      if (piece.clamped) {
         continue;
      }
      UtilitySegment rise;
      rise.flat = false;
      rise.base = piece.base;
      rise.scale = piece.scale;
      rise.reward = agent.actions[piece.owner].reward;
      rise.kappa_i = agent.kappa_i;
      rise.action = piece.owner;

      const double lo = piece.eval(piece.hi);
      const double hi = piece.eval(piece.lo);
      if (!have_running) {
         // First piece at beta_min: seed the running max with its left end.
         running = rise.effective(lo);
         running.contract.gamma = piece.hi;
         have_running = true;
         out.bottom_ = running;
      }

      // Unconstrained peak of the concave piece: (beta - base)^2 = R scale / kappa_i.
      const double peak = std::clamp(piece.base + std::sqrt(rise.reward * piece.scale / agent.kappa_i), lo, hi);
      const double peak_value = rise.value(peak);
      if (peak_value <= running.utility) {
         emit_flat(lo, hi);
         continue;
      }
      double cross = lo;
      if (rise.value(lo) < running.utility) {
         double a = lo;
         double b = peak;
         for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double m = 0.5 * (a + b);
            (rise.value(m) < running.utility ? a : b) = m;
         }
         cross = b;
      }
      emit_flat(lo, cross);
      if (peak > cross) {
         rise.beta_lo = cross;
         rise.beta_hi = peak;
         out.segments_.push_back(rise);
      }
      running = rise.effective(peak);
      if (peak == hi) {
         running.contract.gamma = piece.lo;
      }
      emit_flat(peak, hi);
   }

   out.top_ = running;
   return out;
}

inline UtilityCurve build_utility_curve(const AgentSpec& agent) {
   return build_utility_curve(agent, build_beta_curve(agent));
}

inline double utility_at(const UtilityCurve& curve, double beta_bar) { return curve(beta_bar); }

inline double min_beta(const AgentSpec& agent) { return build_beta_curve(agent)(1.0); }

} // namespace safe_contract

#pragma once

// Minimum inspection probability beta(gamma) that keeps a safe action incentive
// compatible at payment share gamma:
//
//    beta(gamma) = max{ 1 - u_h^{-1}(u_h(gamma) - kappa_s) / (gamma (1 - alpha)), 0 }.
//
// On [gamma_ir, 1] the curve is split into pieces on which both the dominant
// line (owner) and the line containing the "shadow" point
// u_h^{-1}(u_h(gamma) - kappa_s) are fixed. On such a piece
//
//    beta(gamma) = base + scale / gamma,
//    base  = 1 - R_owner / (R_shadow (1 - alpha)),
//    scale = (c_owner - c_shadow + kappa_s) / (R_shadow (1 - alpha)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "safe_contract/agent.hpp"
#include "safe_contract/envelope.hpp"
#include "safe_contract/error.hpp"

namespace safe_contract {

struct BetaPiece {
   double lo = 0.0;
   double hi = 0.0;
   std::size_t owner = 0;  // action index dominant on the piece
   std::size_t shadow = 0; // action index whose segment holds the shadow point
   bool clamped = false;   // beta == 0 on the whole piece
   double base = 0.0;
   double scale = 0.0;

   [[nodiscard]] double eval(double gamma) const noexcept {
      if (clamped) {
         return 0.0;
      }
      return std::clamp(base + scale / gamma, 0.0, 1.0);
   }
};

class BetaCurve {
public:
   [[nodiscard]] double gamma_ir() const noexcept { return gamma_ir_; }
   [[nodiscard]] const std::vector<BetaPiece>& pieces() const noexcept { return pieces_; }
   [[nodiscard]] const UpperEnvelope& envelope() const noexcept { return env_; }
   [[nodiscard]] double kappa_s() const noexcept { return kappa_s_; }
   [[nodiscard]] double alpha() const noexcept { return alpha_; }

   /// Index of the piece containing gamma; on a shared boundary the right piece wins.
   [[nodiscard]] std::size_t piece_index(double gamma) const noexcept {
      auto it = std::upper_bound(pieces_.begin(), pieces_.end(), gamma,
                                 [](double g, const BetaPiece& p) { return g < p.lo; });
      if (it == pieces_.begin()) {
         return 0;
      }
      return static_cast<std::size_t>(it - pieces_.begin()) - 1;
   }

   [[nodiscard]] const BetaPiece& piece_at(double gamma) const { return pieces_[piece_index(gamma)]; }

   /// The shadow point u_h^{-1}(u_h(gamma) - kappa_s).
   [[nodiscard]] double shadow_gamma(double gamma) const { return env_.invert(env_(gamma) - kappa_s_); }

   [[nodiscard]] double operator()(double gamma) const {
      if (gamma < gamma_ir_ - 1e-12) {
         throw Error(Errc::below_ir_threshold, "gamma " + std::to_string(gamma) +
                                                     " is below the participation threshold " +
                                                     std::to_string(gamma_ir_));
      }
      if (gamma > 1.0 + 1e-12) {
         throw Error(Errc::invalid_input, "gamma " + std::to_string(gamma) + " exceeds 1");
      }
      gamma = std::clamp(gamma, gamma_ir_, 1.0);
      return piece_at(gamma).eval(gamma);
   }

private:
   friend BetaCurve build_beta_curve(const AgentSpec& agent);

   UpperEnvelope env_;
   double gamma_ir_ = 0.0;
   double kappa_s_ = 0.0;
   double alpha_ = 0.0;
   std::vector<BetaPiece> pieces_;
};

inline BetaCurve build_beta_curve(const AgentSpec& agent) {
   validate(agent);
   require_safety_feasible(agent);

   BetaCurve curve;
   curve.env_ = build_envelope(agent.actions);
   curve.kappa_s_ = agent.kappa_s;
   curve.alpha_ = agent.alpha;
   const UpperEnvelope& env = curve.env_;

   const double gamma_ir = std::min(env.invert(agent.kappa_s), 1.0);
   curve.gamma_ir_ = gamma_ir;

   // Boundaries: envelope breakpoints, plus the gammas whose shadow sits on a breakpoint.
   std::vector<double> cuts{gamma_ir, 1.0};
   for (double b : env.breakpoints()) {
      if (b > gamma_ir && b < 1.0) {
         cuts.push_back(b);
      }
      const double g = env.invert(env(b) + agent.kappa_s);
      if (g > gamma_ir && g < 1.0) {
         cuts.push_back(g);
      }
   }
   std::sort(cuts.begin(), cuts.end());
   cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a <= 1e-12; }),
              cuts.end());
   if (cuts.size() == 1) {
      cuts.push_back(1.0); // gamma_ir == 1 only when feasibility is razor thin
   }

   const double keep = 1.0 - agent.alpha;
   const auto& hull = env.hull_actions();
   auto push = [&](BetaPiece piece) {
      if (piece.hi - piece.lo > 0.0 || curve.pieces_.empty()) {
         curve.pieces_.push_back(piece);
      }
   };

   for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k];
      const double hi = cuts[k + 1];
      const double mid = 0.5 * (lo + hi);
      const std::size_t own_seg = env.segment_at(mid);
      const std::size_t shadow_seg = env.segment_of_value(env(mid) - agent.kappa_s);
      const Action& own = env.segment_line(own_seg);
      const Action& sha = env.segment_line(shadow_seg);

      BetaPiece piece;
      piece.lo = lo;
      piece.hi = hi;
      piece.owner = hull[own_seg];
      piece.shadow = hull[shadow_seg];
      if (agent.kappa_s <= 0.0 || lo <= 0.0) {
         piece.clamped = true;
         push(piece);
         continue;
      }
      piece.base = 1.0 - own.reward / (sha.reward * keep);
      piece.scale = (own.cost - sha.cost + agent.kappa_s) / (sha.reward * keep);

      // beta is decreasing on the piece, so it changes sign at most once.
      const double at_lo = piece.base + piece.scale / lo;
      const double at_hi = piece.base + piece.scale / hi;
      if (at_lo <= 0.0) {
         piece.clamped = true;
         push(piece);
      } else if (at_hi >= 0.0) {
         push(piece);
      } else {
         const double root = std::clamp(piece.scale / -piece.base, lo, hi);
         BetaPiece left = piece;
         left.hi = root;
         BetaPiece right = piece;
         right.lo = root;
         right.clamped = true;
         push(left);
         push(right);
      }
   }
   return curve;
}

inline double beta_at(const BetaCurve& curve, double gamma) { return curve(gamma); }

} // namespace safe_contract

#pragma once

// Upper envelope of the agent-utility lines h_i(gamma) = gamma * R_i - c_i.
//
// By point/line duality the envelope is the lower convex hull of the points
// (R_i, c_i): a line owns a segment of the envelope exactly when its point is a
// vertex of that hull, and consecutive hull vertices meet at gamma equal to the
// slope of the hull edge between them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "safe_contract/error.hpp"

namespace safe_contract {

/// One effort level: expected reward to the principal and effort cost to the agent.
struct Action {
   double reward = 0.0;
   double cost = 0.0;

   [[nodiscard]] double utility(double gamma) const noexcept { return gamma * reward - cost; }
};

class UpperEnvelope {
public:
   UpperEnvelope() = default;

   /// Indices into the original action list, strictly increasing.
   [[nodiscard]] const std::vector<std::size_t>& hull_actions() const noexcept { return hull_; }

   /// Interior breakpoints b_1 < ... < b_{k-1}. Segment j covers [b_{j-1}, b_j]
   /// with b_0 = 0 and b_k = +inf, and is owned by hull_actions()[j].
   [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breaks_; }

   [[nodiscard]] std::size_t segment_count() const noexcept { return lines_.size(); }
   [[nodiscard]] const Action& segment_line(std::size_t j) const { return lines_.at(j); }

   [[nodiscard]] double segment_lo(std::size_t j) const { return j == 0 ? 0.0 : breaks_.at(j - 1); }
   [[nodiscard]] double segment_hi(std::size_t j) const {
      return j + 1 == lines_.size() ? std::numeric_limits<double>::infinity() : breaks_.at(j);
   }

   /// Segment owning gamma. At a breakpoint the later (higher-reward) segment wins.
   [[nodiscard]] std::size_t segment_at(double gamma) const noexcept {
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), gamma);
      return static_cast<std::size_t>(it - breaks_.begin());
   }

   /// Segment containing the largest preimage of y (see invert()).
   [[nodiscard]] std::size_t segment_of_value(double y) const noexcept {
      auto it = std::upper_bound(knot_values_.begin(), knot_values_.end(), y);
      return static_cast<std::size_t>(it - knot_values_.begin());
   }

   [[nodiscard]] double operator()(double gamma) const noexcept {
      return lines_[segment_at(gamma)].utility(gamma);
   }

   /// Lowest value of the envelope on [0, inf).
   [[nodiscard]] double floor_value() const noexcept { return lines_.front().utility(0.0); }

   /// Largest gamma >= 0 with u_h(gamma) = y. The envelope is strictly increasing
   /// except on a leading flat segment (R_1 = 0), where the right end is returned.
   [[nodiscard]] double invert(double y) const {
      const double floor = floor_value();
      if (y < floor - kTolerance) {
         throw Error(Errc::below_range, "value " + std::to_string(y) +
                                              " is below the envelope minimum " + std::to_string(floor));
      }
      y = std::max(y, floor);
      const std::size_t j = segment_of_value(y);
      const Action& line = lines_[j];
      if (line.reward <= 0.0) {
         return std::numeric_limits<double>::infinity();
      }
      const double gamma = (y + line.cost) / line.reward;
      return std::clamp(gamma, segment_lo(j), segment_hi(j));
   }

private:
   friend UpperEnvelope build_envelope(std::span<const Action> actions);

   std::vector<std::size_t> hull_;
   std::vector<double> breaks_;
   std::vector<Action> lines_;
   std::vector<double> knot_values_; // u_h at each interior breakpoint
};

/// Builds the envelope of actions already sorted by strictly increasing cost and reward.
/// A hull vertex collinear with its neighbours (within kTolerance on the cross product)
/// is dropped so every segment has a single owner.
inline UpperEnvelope build_envelope(std::span<const Action> actions) {
   if (actions.empty()) {
      throw Error(Errc::invalid_input, "envelope needs at least one action");
   }
   for (std::size_t i = 1; i < actions.size(); ++i) {
      const Action& a = actions[i - 1];
      const Action& b = actions[i];
      if (!(b.reward > a.reward) || !(b.cost > a.cost)) {
         throw Error(Errc::degenerate_input,
                     "actions " + std::to_string(i) + " and " + std::to_string(i + 1) +
                        " must have strictly increasing reward and cost");
      }
   }

   // Andrew's monotone chain on points already ordered by reward (lower hull).
   std::vector<std::size_t> hull;
   hull.reserve(actions.size());
   auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
      const Action& p = actions[o];
      const Action& q = actions[a];
      const Action& r = actions[b];
      return (q.reward - p.reward) * (r.cost - p.cost) - (q.cost - p.cost) * (r.reward - p.reward);
   };
   for (std::size_t i = 0; i < actions.size(); ++i) {
      while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= kTolerance) {
         hull.pop_back();
      }
      hull.push_back(i);
   }

   UpperEnvelope env;
   env.hull_ = std::move(hull);
   env.lines_.reserve(env.hull_.size());
   for (std::size_t idx : env.hull_) {
      env.lines_.push_back(actions[idx]);
   }
   for (std::size_t j = 1; j < env.lines_.size(); ++j) {
      const Action& lo = env.lines_[j - 1];
      const Action& hi = env.lines_[j];
      const double b = (hi.cost - lo.cost) / (hi.reward - lo.reward);
      env.breaks_.push_back(b);
      env.knot_values_.push_back(hi.utility(b));
   }
   return env;
}

inline double eval_envelope(const UpperEnvelope& env, double gamma) { return env(gamma); }

inline double invert_envelope(const UpperEnvelope& env, double y) { return env.invert(y); }

} // namespace safe_contract

#pragma once

// Sequential random assignment of B inspectors to m agents such that agent l is
// inspected with probability t_l and never by two inspectors.
//
// With prefix sums S_l, boundary l_b is the first agent with S_l >= b and
// zeta_b = b - S_{l_b - 1} is the share of agent l_b covered by inspector b.
// Inspector b works on the window {l_{b-1}, ..., l_b}. Agent l_{b-1} is split
// between inspectors b-1 and b, so inspector b's rule depends on whether
// inspector b-1 picked it:
//
//   picked:     agent l in (l_{b-1}, l_b] w.p. mass_l / (1 - t_{l_{b-1}} + zeta_{b-1})
//   not picked: agent l_{b-1} w.p. (t_{l_{b-1}} - zeta_{b-1}) / (1 - zeta_{b-1}), the
//               rest of the unit split over (l_{b-1}, l_b] in proportion to mass_l,
//
// where mass_l = t_l for interior agents and zeta_b for l_b. When sum t < B the
// trailing inspectors keep the leftover probability as an explicit idle outcome.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "safe_contract/error.hpp"

namespace safe_contract {

struct InspectorRule {
   bool active = false;        // false: inspector is always idle
   std::size_t first = 0;      // l_{b-1}, shared with the previous inspector (b >= 2)
   std::size_t last = 0;       // l_b, or m-1 when the cumulative sum never reaches b
   bool has_boundary = false;  // whether l_b exists
   double residual = 0.0;      // zeta_b
   // Probabilities for agents first+1..last given the previous inspector took `first`.
   std::vector<double> when_prev_on_first;
   // Probabilities for agents first..last otherwise (for inspector 1, unconditional).
   std::vector<double> otherwise;
};

class InspectionSchedule {
public:
   [[nodiscard]] const std::vector<double>& targets() const noexcept { return targets_; }
   [[nodiscard]] int budget() const noexcept { return budget_; }
   [[nodiscard]] const std::vector<InspectorRule>& inspectors() const noexcept { return rules_; }

private:
   friend InspectionSchedule build_schedule(std::span<const double> targets, int budget);

   std::vector<double> targets_;
   int budget_ = 0;
   std::vector<InspectorRule> rules_;
};

inline InspectionSchedule build_schedule(std::span<const double> targets, int budget) {
   constexpr double tol = 1e-12;
   if (budget <= 0) {
      throw Error(Errc::invalid_input, "budget must be a positive integer");
   }
   double total = 0.0;
   for (std::size_t l = 0; l < targets.size(); ++l) {
      const double t = targets[l];
      if (!std::isfinite(t) || t < 0.0 || t > 1.0) {
         throw Error(Errc::invalid_probability,
                     "target for agent " + std::to_string(l + 1) + " is outside [0, 1]: " + std::to_string(t));
      }
      total += t;
   }
   if (total > static_cast<double>(budget) + tol) {
      throw Error(Errc::budget_exceeded,
                  "targets sum to " + std::to_string(total) + " which exceeds the budget " + std::to_string(budget));
   }

   const std::size_t m = targets.size();
   std::vector<double> prefix(m + 1, 0.0); // prefix[l] = t_0 + ... + t_{l-1}
   for (std::size_t l = 0; l < m; ++l) {
      prefix[l + 1] = prefix[l] + targets[l];
   }

   // boundary[b] for b = 1..B (0-based agent index), residual[b] = zeta_b.
   std::vector<std::optional<std::size_t>> boundary(static_cast<std::size_t>(budget) + 1);
   std::vector<double> residual(static_cast<std::size_t>(budget) + 1, 0.0);
   {
      std::size_t l = 0;
      for (int b = 1; b <= budget; ++b) {
         const double level = static_cast<double>(b);
         while (l < m && prefix[l + 1] < level - tol) {
            ++l;
         }
         if (l == m) {
            break;
         }
         boundary[b] = l;
         residual[b] = std::clamp(level - prefix[l], 0.0, targets[l]);
      }
   }

   InspectionSchedule s;
   s.targets_.assign(targets.begin(), targets.end());
   s.budget_ = budget;
   s.rules_.resize(static_cast<std::size_t>(budget));

   auto mass = [&](std::size_t l, int b) {
      return (boundary[b] && l == *boundary[b]) ? residual[b] : targets[l];
   };

   for (int b = 1; b <= budget; ++b) {
      InspectorRule& rule = s.rules_[static_cast<std::size_t>(b - 1)];
      rule.has_boundary = boundary[b].has_value();
      rule.residual = residual[b];
      if (m == 0) {
         continue;
      }
      rule.last = boundary[b].value_or(m - 1);
      if (b == 1) {
         rule.active = true;
         rule.first = 0;
         for (std::size_t l = 0; l <= rule.last; ++l) {
            rule.otherwise.push_back(mass(l, b));
         }
         continue;
      }
      if (!boundary[b - 1]) {
         continue; // everything is already covered by earlier inspectors
      }
      rule.active = true;
      const std::size_t first = *boundary[b - 1];
      rule.first = first;
      const double shared = targets[first];
      const double prev_share = residual[b - 1];
      const double free_mass = 1.0 - shared + prev_share;
      const double stay = 1.0 - prev_share;

      for (std::size_t l = first + 1; l <= rule.last; ++l) {
         rule.when_prev_on_first.push_back(std::clamp(mass(l, b) / free_mass, 0.0, 1.0));
      }
      if (stay <= tol) {
         // The previous inspector always takes `first`; this branch has probability 0.
         rule.otherwise.push_back(0.0);
         rule.otherwise.insert(rule.otherwise.end(), rule.when_prev_on_first.begin(),
                               rule.when_prev_on_first.end());
         continue;
      }
      rule.otherwise.push_back(std::clamp((shared - prev_share) / stay, 0.0, 1.0));
      const double rest = (1.0 - shared) / (free_mass * stay);
      for (std::size_t l = first + 1; l <= rule.last; ++l) {
         rule.otherwise.push_back(std::clamp(mass(l, b) * rest, 0.0, 1.0));
      }
   }
   return s;
}

/// Exact per-agent inspection probabilities implied by the schedule. The only
/// dependence between inspectors is through the event {w_{b-1} = l_{b-1}}, so a
/// single forward pass suffices.
inline std::vector<double> exact_marginals(const InspectionSchedule& schedule) {
   std::vector<double> marginal(schedule.targets().size(), 0.0);
   double prev_on_boundary = 0.0; // P(w_{b-1} = l_{b-1})
   bool prev_has_boundary = false;
   for (const InspectorRule& rule : schedule.inspectors()) {
      double on_boundary = 0.0;
      if (rule.active) {
         const double p = prev_has_boundary ? prev_on_boundary : 0.0;
         for (std::size_t k = 0; k < rule.otherwise.size(); ++k) {
            const std::size_t agent = rule.first + k;
            double prob = (1.0 - p) * rule.otherwise[k];
            if (k > 0 && !rule.when_prev_on_first.empty()) {
               prob += p * rule.when_prev_on_first[k - 1];
            }
            marginal[agent] += prob;
            if (rule.has_boundary && agent == rule.last) {
               on_boundary = prob;
            }
         }
      }
      prev_on_boundary = on_boundary;
      prev_has_boundary = rule.active && rule.has_boundary;
   }
   return marginal;
}

/// One realisation: entry b is the agent inspected by inspector b, or nullopt if idle.
inline std::vector<std::optional<std::size_t>> sample_assignment(const InspectionSchedule& schedule,
                                                                 std::mt19937_64& rng) {
   std::uniform_real_distribution<double> unit(0.0, 1.0);
   std::vector<std::optional<std::size_t>> out;
   out.reserve(schedule.inspectors().size());
   bool prev_on_boundary = false;
   for (const InspectorRule& rule : schedule.inspectors()) {
      std::optional<std::size_t> pick;
      if (rule.active) {
         const bool conditioned = prev_on_boundary && !rule.when_prev_on_first.empty();
         const auto& probs = conditioned ? rule.when_prev_on_first : rule.otherwise;
         const std::size_t offset = conditioned ? rule.first + 1 : rule.first;
         const double u = unit(rng);
         double acc = 0.0;
         for (std::size_t k = 0; k < probs.size(); ++k) {
            acc += probs[k];
            if (u < acc) {
               pick = offset + k;
               break;
            }
         }
      }
      prev_on_boundary = pick && rule.has_boundary && *pick == rule.last;
      out.push_back(pick);
   }
   return out;
}

inline std::vector<std::optional<std::size_t>> sample_assignment(const InspectionSchedule& schedule,
                                                                 std::uint64_t seed) {
   std::mt19937_64 rng(seed);
   return sample_assignment(schedule, rng);
}

} // namespace safe_contract

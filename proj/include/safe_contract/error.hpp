#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace safe_contract {

enum class Errc {
   invalid_input,        // malformed or out-of-range field
   degenerate_input,     // two actions share a reward or a cost, or ordering broken
   below_range,          // envelope inverse requested below u_h(0)
   infeasible_safety,    // max_i (R_i - c_i) <= kappa_s
   below_ir_threshold,   // gamma below the participation threshold
   below_min_inspection, // cap below beta_min
   infeasible_budget,    // sum of beta_min exceeds the budget
   nonpositive_lower_bound,
   budget_exceeded,      // schedule targets sum above B
   invalid_probability,  // schedule target outside [0,1]
   no_safe_contract,     // brute-force grid found nothing implementable
   internal,
};

constexpr std::string_view to_string(Errc code) noexcept {
   switch (code) {
      case Errc::invalid_input: return "InvalidInput";
      case Errc::degenerate_input: return "DegenerateInput";
      case Errc::below_range: return "BelowRange";
      case Errc::infeasible_safety: return "InfeasibleSafety";
      case Errc::below_ir_threshold: return "BelowIRThreshold";
      case Errc::below_min_inspection: return "BelowMinimumInspection";
      case Errc::infeasible_budget: return "InfeasibleBudget";
      case Errc::nonpositive_lower_bound: return "NonpositiveLowerBound";
      case Errc::budget_exceeded: return "BudgetExceeded";
      case Errc::invalid_probability: return "InvalidProbability";
      case Errc::no_safe_contract: return "NoSafeContract";
      case Errc::internal: return "Internal";
   }
   return "Unknown";
}

class Error : public std::runtime_error {
public:
   Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

   [[nodiscard]] Errc code() const noexcept { return code_; }

   /// The message without the code prefix.
   [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
   Errc code_;
   std::string detail_;
};

/// Absolute tolerance used for all floating-point comparisons unless a caller says otherwise.
inline constexpr double kTolerance = 1e-9;

} // namespace safe_contract

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "instance.hpp"
#include "safe_contract/safe_contract.hpp"

namespace cli {

namespace sc = safe_contract;

enum ExitCode : int { exit_ok = 0, exit_infeasible = 1, exit_invalid = 2, exit_internal = 3 };

inline int exit_code_for(sc::Errc code) {
   switch (code) {
      case sc::Errc::infeasible_safety:
      case sc::Errc::infeasible_budget:
      case sc::Errc::nonpositive_lower_bound:
      case sc::Errc::no_safe_contract:
         return exit_infeasible;
      case sc::Errc::internal:
         return exit_internal;
      default:
         return exit_invalid;
   }
}

namespace detail {

inline std::string fixed(double v, int digits) {
   char buf[64];
   std::snprintf(buf, sizeof buf, "%.*f", digits, v);
   return buf;
}

inline std::string sig(double v, int digits) {
   char buf[64];
   std::snprintf(buf, sizeof buf, "%.*g", digits, v);
   return buf;
}

struct Common {
   std::string file;
   std::string out_path;
   int precision = 6;
};

inline const instance::NamedAgent& pick_agent(const instance::Instance& inst, const std::string& name) {
   if (name.empty()) {
      if (inst.agents.size() != 1) {
         throw sc::Error(sc::Errc::invalid_input, "instance has several agents; choose one with --agent");
      }
      return inst.agents.front();
   }
   for (const auto& a : inst.agents) {
      if (a.name == name) {
         return a;
      }
   }
   throw sc::Error(sc::Errc::invalid_input, "no agent named '" + name + "'");
}

inline sc::Allocation run_allocation(const instance::Instance& inst, std::optional<double> delta,
                                     std::optional<double> epsilon) {
   sc::AllocationProblem p;
   p.agents = inst.specs();
   p.budget = inst.budget;
   if (!delta && !epsilon) {
      delta = 0.01;
   }
   p.delta = delta;
   p.epsilon = epsilon;
   return sc::allocate(p);
}

} // namespace detail

/// Runs one command. `args` excludes the program name. Returns the process exit code.
inline int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false) {
   const std::string error_tag = color ? "\033[31merror:\033[0m " : "error: ";

   CLI::App app{"Optimal linear contracts with safety inspections", "safe-contract"};
   app.require_subcommand(1);
   app.set_version_flag("--version", "0.1.0");

   detail::Common common;
   auto add_common = [&](CLI::App* sub) {
      sub->add_option("file", common.file, "Instance JSON file")->required();
      sub->add_option("--out", common.out_path, "Write output to PATH instead of stdout");
      sub->add_option("--precision", common.precision, "Digits in numeric output")
         ->check(CLI::Range(1, 17))
         ->capture_default_str();
   };

   std::string agent_name;
   int samples = 101;
   std::string param;
   double from = 0.0;
   double to = 0.0;
   int steps = 2;
   std::optional<double> delta;
   std::optional<double> epsilon;
   bool from_allocation = false;
   std::vector<double> targets;
   int draws = 0;
   std::uint64_t seed = 0;
   double grid_step = 1e-3;

   auto* solve = app.add_subcommand("solve", "Optimal single-agent contract for each agent");
   add_common(solve);
   solve->add_option("--agent", agent_name, "Only this agent");

   auto* curve = app.add_subcommand("beta-curve", "CSV of the minimum inspection probability over gamma");
   add_common(curve);
   curve->add_option("--agent", agent_name, "Agent name (optional with a single agent)");
   curve->add_option("--samples", samples, "Number of gamma samples")->check(CLI::Range(2, 10'000'000))->capture_default_str();

   auto* sweep = app.add_subcommand("sweep", "CSV of the optimal contract as one parameter varies");
   add_common(sweep);
   sweep->add_option("--agent", agent_name, "Agent name (optional with a single agent)");
   sweep->add_option("--param", param, "Parameter to vary")
      ->required()
      ->check(CLI::IsMember({"kappa_i", "kappa_s", "alpha"}));
   sweep->add_option("--from", from, "First grid value")->required();
   sweep->add_option("--to", to, "Last grid value")->required();
   sweep->add_option("--steps", steps, "Number of grid values")->check(CLI::Range(1, 10'000'000))->capture_default_str();

   auto* alloc = app.add_subcommand("allocate", "Split the inspection budget across agents");
   add_common(alloc);
   auto* delta_opt = alloc->add_option("--delta", delta, "Grid step (default 0.01)");
   alloc->add_option("--epsilon", epsilon, "Relative accuracy target")->excludes(delta_opt);

   auto* sched = app.add_subcommand("schedule", "Randomised assignment of inspectors to agents");
   add_common(sched);
   auto* from_alloc = sched->add_flag("--from-allocation", from_allocation, "Use the effective inspection probabilities of allocate");
   sched->add_option("--targets", targets, "Comma-separated inspection probabilities, one per agent")
      ->delimiter(',')
      ->excludes(from_alloc);
   auto* sdelta = sched->add_option("--delta", delta, "Grid step for --from-allocation");
   sched->add_option("--epsilon", epsilon, "Relative accuracy for --from-allocation")->excludes(sdelta);
   sched->add_option("--samples", draws, "Number of sampled assignments")->check(CLI::NonNegativeNumber);
   sched->add_option("--seed", seed, "Random seed");

   auto* verify = app.add_subcommand("verify", "Cross-check the solvers against brute force");
   add_common(verify);
   verify->add_option("--grid-step", grid_step, "Oracle grid step")->check(CLI::PositiveNumber)->capture_default_str();

   try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(std::move(reversed));
   } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e, out, err);
      return rc == 0 ? exit_ok : exit_invalid;
   }

   std::ofstream file_out;
   std::ostream* sink = &out;
   if (!common.out_path.empty()) {
      file_out.open(common.out_path);
      if (!file_out) {
         err << error_tag << "cannot write to '" << common.out_path << "'\n";
         return exit_invalid;
      }
      sink = &file_out;
   }
   std::ostream& os = *sink;
   const int p = common.precision;

   try {
      const instance::Instance inst = instance::load_instance(common.file);

      if (solve->parsed()) {
         std::vector<const instance::NamedAgent*> chosen;
         if (agent_name.empty()) {
            for (const auto& a : inst.agents) {
               chosen.push_back(&a);
            }
         } else {
            chosen.push_back(&detail::pick_agent(inst, agent_name));
         }
         for (const auto* a : chosen) {
            try {
               const sc::SingleSolution s = sc::solve_single(a->spec);
               os << "agent=" << a->name << " gamma=" << detail::fixed(s.contract.gamma, p)
                  << " beta=" << detail::fixed(s.contract.beta, p) << " action=" << s.action + 1
                  << " utility=" << detail::fixed(s.utility, p) << '\n';
            } catch (const sc::Error& e) {
               throw sc::Error(e.code(), "agent " + a->name + ": " + e.detail());
            }
         }
         return exit_ok;
      }

      if (curve->parsed()) {
         const auto& a = detail::pick_agent(inst, agent_name);
         const sc::BetaCurve bc = sc::build_beta_curve(a.spec);
         os << "gamma,beta\n";
         const double lo = bc.gamma_ir();
         for (int k = 0; k < samples; ++k) {
            const double g = (k + 1 == samples) ? 1.0 : lo + (1.0 - lo) * k / (samples - 1);
            os << detail::sig(g, p) << ',' << detail::sig(bc(g), p) << '\n';
         }
         return exit_ok;
      }

      if (sweep->parsed()) {
         const auto& a = detail::pick_agent(inst, agent_name);
         const sc::SweepParam which = param == "kappa_i"   ? sc::SweepParam::kappa_i
                                      : param == "kappa_s" ? sc::SweepParam::kappa_s
                                                           : sc::SweepParam::alpha;
         std::vector<double> grid;
         for (int k = 0; k < steps; ++k) {
            grid.push_back(steps == 1 ? from : from + (to - from) * k / (steps - 1));
         }
         os << "value,gamma_star,beta_star,utility\n";
         for (const auto& row : sc::sweep_parameter(a.spec, which, grid)) {
            os << detail::sig(row.value, p);
            if (row.solution) {
               os << ',' << detail::sig(row.solution->contract.gamma, p) << ','
                  << detail::sig(row.solution->contract.beta, p) << ',' << detail::sig(row.solution->utility, p)
                  << '\n';
            } else {
               os << ",infeasible,infeasible,infeasible\n";
               err << "note: " << param << '=' << detail::sig(row.value, p) << ": " << row.error << '\n';
            }
         }
         return exit_ok;
      }

      if (alloc->parsed()) {
         const sc::Allocation a = detail::run_allocation(inst, delta, epsilon);
         for (std::size_t l = 0; l < a.agents.size(); ++l) {
            const auto& x = a.agents[l];
            os << "agent=" << inst.agents[l].name << " beta_bar=" << detail::fixed(x.cap, p)
               << " gamma=" << detail::fixed(x.effective.contract.gamma, p)
               << " beta_effective=" << detail::fixed(x.effective.contract.beta, p)
               << " action=" << x.effective.action + 1 << " utility=" << detail::fixed(x.effective.utility, p)
               << '\n';
         }
         os << "total=" << detail::fixed(a.total_utility, p) << '\n';
         os << "gap_bound=" << detail::fixed(a.gap_bound, p) << '\n';
         os << "delta=" << detail::sig(a.delta, p) << '\n';
         return exit_ok;
      }

      if (sched->parsed()) {
         std::vector<double> t;
         if (from_allocation) {
            for (const auto& x : detail::run_allocation(inst, delta, epsilon).agents) {
               t.push_back(x.effective.contract.beta);
            }
         } else if (!targets.empty()) {
            if (targets.size() != inst.agents.size()) {
               throw sc::Error(sc::Errc::invalid_input, "--targets has " + std::to_string(targets.size()) +
                                                           " values but the instance has " +
                                                           std::to_string(inst.agents.size()) + " agents");
            }
            t = targets;
         } else {
            throw sc::Error(sc::Errc::invalid_input, "schedule needs --from-allocation or --targets");
         }
         const sc::InspectionSchedule s = sc::build_schedule(t, inst.budget);
         const std::vector<double> exact = sc::exact_marginals(s);
         std::vector<double> hits(t.size(), 0.0);
         if (draws > 0) {
            std::mt19937_64 rng(seed);
            for (int k = 0; k < draws; ++k) {
               std::set<std::size_t> seen;
               for (const auto& w : sc::sample_assignment(s, rng)) {
                  if (!w) {
                     continue;
                  }
                  if (!seen.insert(*w).second) {
                     throw sc::Error(sc::Errc::internal, "agent " + inst.agents[*w].name +
                                                            " drawn twice in sample " + std::to_string(k));
                  }
                  hits[*w] += 1.0;
               }
            }
         }
         os << "agent,target,exact" << (draws > 0 ? ",empirical" : "") << '\n';
         for (std::size_t l = 0; l < t.size(); ++l) {
            os << inst.agents[l].name << ',' << detail::sig(t[l], p) << ',' << detail::sig(exact[l], p);
            if (draws > 0) {
               os << ',' << detail::sig(hits[l] / draws, p);
            }
            os << '\n';
         }
         return exit_ok;
      }

      if (verify->parsed()) {
         bool all_ok = true;
         auto report = [&](const std::string& check, const std::string& who, bool ok, const std::string& detail) {
            all_ok = all_ok && ok;
            os << "check=" << check << " agent=" << who << " status=" << (ok ? "pass" : "FAIL") << ' ' << detail
               << '\n';
         };
         for (const auto& a : inst.agents) {
            const sc::SingleSolution s = sc::solve_single(a.spec);
            const sc::OracleSolution o = sc::brute_force_single(a.spec, grid_step);
            const bool dominates = s.utility >= o.utility - 2e-2;
            std::string detail = "solver=" + detail::fixed(s.utility, p) + " oracle=" + detail::fixed(o.utility, p);
            if (!dominates) {
               detail += " counterexample: gamma=" + detail::sig(o.contract.gamma, 17) +
                         " beta=" + detail::sig(o.contract.beta, 17) + " action=" +
                         std::to_string(o.choice.action + 1);
            }
            report("oracle", a.name, dominates, detail);
            const bool icir = sc::check_ic_ir(a.spec, s.contract, {s.action, true}, 1e-9);
            report("ic_ir", a.name, icir,
                   "gamma=" + detail::sig(s.contract.gamma, 17) + " beta=" + detail::sig(s.contract.beta, 17) +
                      " action=" + std::to_string(s.action + 1));
         }

         sc::AllocationProblem problem{inst.specs(), inst.budget, 0.01, std::nullopt};
         const sc::Allocation dp = sc::allocate(problem);
         for (std::size_t l = 0; l < dp.agents.size(); ++l) {
            const auto& x = dp.agents[l];
            report("allocation_ic_ir", inst.agents[l].name,
                   sc::check_ic_ir(inst.agents[l].spec, x.effective.contract, {x.effective.action, true}, 1e-9),
                   "gamma=" + detail::sig(x.effective.contract.gamma, 17) +
                      " beta=" + detail::sig(x.effective.contract.beta, 17));
         }
         if (inst.agents.size() <= 3) {
            const sc::Allocation bf = sc::brute_force_allocate(problem, 0.01);
            report("allocation_oracle", "*", dp.total_utility >= bf.total_utility - 1e-9,
                   "dp=" + detail::fixed(dp.total_utility, p) + " oracle=" + detail::fixed(bf.total_utility, p));
         } else {
            os << "check=allocation_oracle agent=* status=skipped more than three agents\n";
         }
         std::vector<double> t;
         for (const auto& x : dp.agents) {
            t.push_back(x.effective.contract.beta);
         }
         const std::vector<double> marg = sc::exact_marginals(sc::build_schedule(t, inst.budget));
         double worst = 0.0;
         for (std::size_t l = 0; l < t.size(); ++l) {
            worst = std::max(worst, std::abs(marg[l] - t[l]));
         }
         report("schedule_marginals", "*", worst <= 1e-12, "max_error=" + detail::sig(worst, 3));
         return all_ok ? exit_ok : exit_internal;
      }
   } catch (const sc::Error& e) {
      err << error_tag << e.what() << '\n';
      return exit_code_for(e.code());
   } catch (const std::exception& e) {
      err << error_tag << "internal: " << e.what() << '\n';
      return exit_internal;
   }
   return exit_internal;
}

} // namespace cli

#pragma once

// Instance files: one JSON document
//
//   {
//     "budget": 1,
//     "agents": [
//       {"name": "a1", "actions": [{"reward": 10, "cost": 2}], "kappa_s": 1, "kappa_i": 1, "alpha": 0}
//     ]
//   }
//
// Unknown keys are rejected so that a misspelt kappa does not silently fall back to a default.

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "safe_contract/safe_contract.hpp"

namespace instance {

using safe_contract::Errc;
using safe_contract::Error;

struct NamedAgent {
   std::string name;
   safe_contract::AgentSpec spec;
};

struct Instance {
   std::vector<NamedAgent> agents;
   int budget = 1;

   [[nodiscard]] std::vector<safe_contract::AgentSpec> specs() const {
      std::vector<safe_contract::AgentSpec> out;
      out.reserve(agents.size());
      for (const auto& a : agents) {
         out.push_back(a.spec);
      }
      return out;
   }
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
   throw Error(Errc::invalid_input, path + ": " + what);
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
   for (const auto& item : obj.items()) {
      bool ok = false;
      for (const char* key : allowed) {
         ok = ok || item.key() == key;
      }
      if (!ok) {
         fail(path.empty() ? item.key() : path + "." + item.key(), "unknown field");
      }
   }
}

inline const json& require_object(const json& j, const std::string& path) {
   if (!j.is_object()) {
      fail(path.empty() ? "instance" : path, "expected an object");
   }
   return j;
}

inline double number(const json& obj, const std::string& path, const char* key) {
   const std::string where = path + "." + key;
   if (!obj.contains(key)) {
      fail(where, "missing required field");
   }
   const json& v = obj.at(key);
   if (!v.is_number()) {
      fail(where, "expected a number");
   }
   return v.get<double>();
}

inline double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
   return obj.contains(key) ? number(obj, path, key) : fallback;
}

} // namespace detail

inline Instance parse_instance(const nlohmann::json& doc) {
   using detail::fail;
   using nlohmann::json;

   detail::require_object(doc, "");
   detail::reject_unknown(doc, "", {"budget", "agents"});

   Instance inst;
   if (doc.contains("budget")) {
      const json& b = doc.at("budget");
      if (!b.is_number_integer() && !b.is_number_unsigned()) {
         fail("budget", "expected a positive integer");
      }
      const auto value = b.get<long long>();
      if (value <= 0 || value > 1'000'000) {
         fail("budget", "expected a positive integer");
      }
      inst.budget = static_cast<int>(value);
   }
   if (!doc.contains("agents") || !doc.at("agents").is_array()) {
      fail("agents", "expected an array of agents");
   }
   const json& agents = doc.at("agents");
   if (agents.empty()) {
      fail("agents", "at least one agent is required");
   }

   for (std::size_t k = 0; k < agents.size(); ++k) {
      const std::string path = "agents[" + std::to_string(k) + "]";
      const json& a = detail::require_object(agents[k], path);
      detail::reject_unknown(a, path, {"name", "actions", "kappa_s", "kappa_i", "alpha"});

      NamedAgent named;
      if (a.contains("name")) {
         if (!a.at("name").is_string()) {
            fail(path + ".name", "expected a string");
         }
         named.name = a.at("name").get<std::string>();
      } else {
         named.name = "a" + std::to_string(k + 1);
      }
      for (const auto& other : inst.agents) {
         if (other.name == named.name) {
            fail(path + ".name", "duplicate agent name '" + named.name + "'");
         }
      }

      if (!a.contains("actions") || !a.at("actions").is_array()) {
         fail(path + ".actions", "expected an array of actions");
      }
      const json& acts = a.at("actions");
      for (std::size_t i = 0; i < acts.size(); ++i) {
         const std::string apath = path + ".actions[" + std::to_string(i) + "]";
         const json& act = detail::require_object(acts[i], apath);
         detail::reject_unknown(act, apath, {"reward", "cost"});
         named.spec.actions.push_back({detail::number(act, apath, "reward"), detail::number(act, apath, "cost")});
      }
      named.spec.kappa_s = detail::number(a, path, "kappa_s");
      named.spec.kappa_i = detail::number(a, path, "kappa_i");
      named.spec.alpha = detail::number_or(a, path, "alpha", 0.0);

      try {
         safe_contract::validate(named.spec);
      } catch (const Error& e) {
         throw Error(e.code(), path + " (" + named.name + "): " + e.detail());
      }
      inst.agents.push_back(std::move(named));
   }
   return inst;
}

inline Instance parse_instance_text(const std::string& text) {
   nlohmann::json doc;
   try {
      doc = nlohmann::json::parse(text);
   } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::invalid_input, std::string("malformed JSON: ") + e.what());
   }
   return parse_instance(doc);
}

inline Instance load_instance(const std::string& path) {
   std::ifstream in(path);
   if (!in) {
      throw Error(Errc::invalid_input, "cannot open instance file '" + path + "'");
   }
   std::ostringstream buf;
   buf << in.rdbuf();
   return parse_instance_text(buf.str());
}

} // namespace instance

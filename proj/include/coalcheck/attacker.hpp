#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coalcheck/closure.hpp"
#include "coalcheck/coalgebra.hpp"
#include "coalcheck/verify.hpp"

namespace coalcheck {

// An attack rewires a system: it may replace the observation map, and may
// pre-compose a state transform with the transition map (delta o tau).
template <class State>
struct Attack {
  std::string name;
  std::function<ObservationSet(const State&, const ObservationSet&)> observation;
  std::function<State(const State&)> transform;
};

template <class State>
System<State> apply_attack(const System<State>& sys, const Attack<State>& attack) {
  System<State> out = sys.with_name(sys.name() + "/" + attack.name);
  if (attack.observation) {
    out = out.with_observe([inner = sys.observe_fn(), f = attack.observation](const State& x) { return f(x, inner(x)); });
  }
  if (attack.transform) {
    out = out.with_step([inner = sys.step_fn(), f = attack.transform](const State& x, Input i) { return inner(f(x), i); });
  }
  return out;
}

template <class State>
struct Attacker {
  std::string name;
  std::vector<Attack<State>> attacks;
};

struct CapabilityCell {
  std::string attack;
  std::string property;
  Outcome outcome = Outcome::Unknown;
  Stats stats;
  double elapsed_ms = 0;
};

// Which properties an attacker can violate. Unknown verdicts never count as
// capabilities; they mark the report undetermined.
struct CapabilityReport {
  std::string attacker;
  std::vector<std::string> properties;
  std::vector<CapabilityCell> cells;
  std::set<std::string> capabilities;
  bool undetermined = false;
};

// Runs every attack of the attacker on its own knowledge base, threading the
// properties in the given order.
template <class State>
CapabilityReport capabilities(const Attacker<State>& attacker, const System<State>& sys, const State& x0,
                              std::span<const Property> properties, const ClosureConfig<State>& cfg,
                              const VerifyOptions& options = {}) {
  CapabilityReport report;
  report.attacker = attacker.name;
  for (const auto& p : properties) report.properties.push_back(p.name);
  for (const auto& attack : attacker.attacks) {
    auto attacked = apply_attack(sys, attack);
    KnowledgeBase<State> kb;
    auto summary = check_many(attacked, x0, properties, kb, cfg, options);
    for (const auto& r : summary.results) {
      report.cells.push_back({attack.name, r.property.name, r.verdict.outcome, r.verdict.stats, r.elapsed_ms});
      if (is_violation(r.verdict.outcome)) report.capabilities.insert(r.property.name);
      if (r.verdict.outcome == Outcome::Unknown) report.undetermined = true;
    }
  }
  return report;
}

enum class Comparison { Less, Greater, Equal, Incomparable };

const char* to_string(Comparison c);

// Compares capability sets; throws std::invalid_argument when the reports
// were computed over different property universes.
Comparison compare(const CapabilityReport& a, const CapabilityReport& b);

struct Hierarchy {
  std::vector<std::string> attackers;
  std::vector<std::vector<Comparison>> matrix;
  // Covering pairs (lower, upper) of the strict capability order.
  std::vector<std::pair<std::string, std::string>> edges;
  // For every property, the attackers able to violate it.
  std::map<std::string, std::vector<std::string>> filters;
};

Hierarchy hierarchy(std::span<const CapabilityReport> reports);

}  // namespace coalcheck

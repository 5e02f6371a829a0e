#pragma once

#include <chrono>
#include <cstdint>
#include <memory_resource>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coalcheck/closure.hpp"
#include "coalcheck/coalgebra.hpp"
#include "coalcheck/formula.hpp"

namespace coalcheck {

enum class Outcome { Holds, Fails, InferredHolds, InferredFails, Unknown };

const char* to_string(Outcome o);
bool is_violation(Outcome o);
bool is_inferred(Outcome o);

struct Stats {
  std::uint64_t pairs_explored = 0;
  std::uint64_t closure_hits = 0;
  std::uint64_t subset_checks = 0;
};

template <class State>
struct Verdict {
  Outcome outcome = Outcome::Unknown;
  Stats stats;
  // Fails: the failing pair. Inferred verdicts: the pair decided by inference.
  std::optional<Pair<State>> witness;
  std::optional<Derivation<State>> derivation;
};

struct VerifyOptions {
  std::uint64_t max_pairs = 10'000'000;
};

// Depth-first worklist exploration of (state, formula) pairs with up-to
// inference. The worklist is a stack: successors are pushed on
// top, and a successor inferred to fail is pushed on top and examined next.
// On Holds the run's tentative R is committed to kb; on Fails the failing
// pair is added to F; inferred and unknown outcomes leave kb unchanged.
template <class State>
Verdict<State> verify(const System<State>& sys, const State& x0, FormulaId psi0, KnowledgeBase<State>& kb,
                      const ClosureConfig<State>& cfg, const VerifyOptions& options = {}) {
  if (!is_closed(psi0)) throw std::invalid_argument("verify needs a closed formula");
  using P = Pair<State>;
  Verdict<State> v;
  KnowledgeBase<State> tentative;
  Inference<State> inference(cfg, kb, tentative);
  const std::size_t inputs = sys.input_count();

  std::unordered_map<FormulaId, Predicate> obs_cache;
  std::unordered_map<std::uint64_t, FormulaId> next_cache;
  auto obs_of = [&](FormulaId f) -> const Predicate& {
    auto it = obs_cache.find(f);
    if (it == obs_cache.end()) it = obs_cache.emplace(f, obs(f)).first;
    return it->second;
  };
  auto next_of = [&](FormulaId f, Input i) {
    std::uint64_t key = (std::uint64_t{f.value} << 32) | i;
    auto it = next_cache.find(key);
    if (it == next_cache.end()) it = next_cache.emplace(key, next(f, i)).first;
    return it->second;
  };

  P start{x0, psi0};
  if (auto d = inference.infer_failed(start)) {
    v.outcome = Outcome::InferredFails;
    v.stats.pairs_explored = 1;
    v.stats.closure_hits = 1;
    v.witness = start;
    v.derivation = d;
    return v;
  }
  if (auto d = inference.infer_satisfied(start)) {
    v.outcome = Outcome::InferredHolds;
    v.stats.pairs_explored = 1;
    v.stats.closure_hits = 1;
    v.witness = start;
    v.derivation = d;
    return v;
  }

  // Lazy deletion keeps at most one live entry per pair. Failure inference
  // only consults the committed F, which is fixed for the run, so a pair
  // popped without priority is already known not to be inferred failed.
  struct Entry {
    P pair;
    std::uint64_t ticket;
    bool priority;
  };
  std::vector<Entry> todo;
  std::pmr::unsynchronized_pool_resource pool;
  std::pmr::unordered_map<P, std::uint64_t, PairHash<State>> live(&pool);
  ObservationSet seen;
  std::uint64_t tickets = 0;
  auto push = [&](const P& p, bool priority) {
    auto [it, fresh] = live.try_emplace(p, 0);
    if (!fresh && !priority) return;
    it->second = ++tickets;
    todo.push_back({p, it->second, priority});
  };
  push(start, false);

  while (!todo.empty()) {
    Entry e = std::move(todo.back());
    todo.pop_back();
    const P& p = e.pair;
    auto it = live.find(p);
    if (it == live.end() || it->second != e.ticket) continue;
    live.erase(it);

    if (e.priority) {
      ++v.stats.pairs_explored;
      ++v.stats.closure_hits;
      v.outcome = Outcome::InferredFails;
      v.witness = p;
      v.derivation = inference.infer_failed(p);
      return v;
    }
    if (inference.infer_satisfied(p)) {
      ++v.stats.closure_hits;
      continue;
    }
    if (v.stats.pairs_explored >= options.max_pairs) {
      v.outcome = Outcome::Unknown;
      return v;
    }
    ++v.stats.pairs_explored;
    ++v.stats.subset_checks;
    const Predicate& allowed = obs_of(p.formula);
    bool ok = true;
    if (!allowed.is_universe()) {
      sys.observe_into(p.state, seen);
      for (const auto& o : seen) {
        if (!member(allowed, o)) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      kb.add_failed(p);
      v.outcome = Outcome::Fails;
      v.witness = p;
      return v;
    }
    tentative.add_satisfied(p);
    for (Input i = 0; i < inputs; ++i) {
      P q{sys.step(p.state, i), next_of(p.formula, i)};
      if (inference.infer_failed(q)) {
        ++v.stats.closure_hits;
        push(q, true);
        break;
      }
      if (inference.infer_satisfied(q)) {
        ++v.stats.closure_hits;
        continue;
      }
      push(q, false);
    }
  }
  kb.merge_satisfied(tentative);
  v.outcome = Outcome::Holds;
  return v;
}

template <class State>
struct PropertyResult {
  Property property;
  Verdict<State> verdict;
  double elapsed_ms = 0;
};

// Checks one property; Refute properties negate the verdict on their body.
template <class State>
PropertyResult<State> check_property(const System<State>& sys, const State& x0, const Property& property,
                                     KnowledgeBase<State>& kb, const ClosureConfig<State>& cfg,
                                     const VerifyOptions& options = {}) {
  auto t0 = std::chrono::steady_clock::now();
  PropertyResult<State> r{property, verify(sys, x0, property.body, kb, cfg, options), 0};
  if (property.polarity == Polarity::Refute) {
    switch (r.verdict.outcome) {
      case Outcome::Holds: r.verdict.outcome = Outcome::Fails; break;
      case Outcome::Fails: r.verdict.outcome = Outcome::Holds; break;
      case Outcome::InferredHolds: r.verdict.outcome = Outcome::InferredFails; break;
      case Outcome::InferredFails: r.verdict.outcome = Outcome::InferredHolds; break;
      case Outcome::Unknown: break;
    }
  }
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

template <class State>
struct CheckSummary {
  std::vector<PropertyResult<State>> results;
  std::size_t inferred = 0;
  std::size_t unknown = 0;
};

// Threads one knowledge base through the properties in the given order.
template <class State>
CheckSummary<State> check_many(const System<State>& sys, const State& x0, std::span<const Property> properties,
                               KnowledgeBase<State>& kb, const ClosureConfig<State>& cfg,
                               const VerifyOptions& options = {}) {
  CheckSummary<State> out;
  for (const auto& p : properties) {
    out.results.push_back(check_property(sys, x0, p, kb, cfg, options));
    Outcome o = out.results.back().verdict.outcome;
    if (is_inferred(o)) ++out.inferred;
    if (o == Outcome::Unknown) ++out.unknown;
  }
  return out;
}

// Orders obligations so that implied formulae come after their implicants.
// Connected groups of the implication graph are ordered by size (largest
// first, ties by first appearance); inside a group a stable topological
// order is used. Unrelated properties keep their relative order.
std::vector<Property> order_properties(std::span<const Property> properties, const Implication& implication);

// Bounded check of the truncated behaviour against a formula: every word w
// up to the prefix depth must observe within obs(next*(psi, w)).
bool holds_on_prefix(const BehaviourPrefix& prefix, FormulaId psi);

}  // namespace coalcheck

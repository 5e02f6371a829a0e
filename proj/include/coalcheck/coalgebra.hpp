#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coalcheck/formula.hpp"
#include "coalcheck/hash.hpp"
#include "coalcheck/predicate.hpp"

namespace coalcheck {

// A coalgebra for FX = P(O) x X^I over an arbitrary state type: an
// observation map and a transition map. Inputs are the codes 0..n-1 of the
// input space.
template <class State>
class System {
 public:
  using state_type = State;
  using ObserveFn = std::function<ObservationSet(const State&)>;
  // Writes the observations into a caller-owned buffer, letting hot loops
  // reuse its storage.
  using ObserveIntoFn = std::function<void(const State&, ObservationSet&)>;
  using StepFn = std::function<State(const State&, Input)>;

  System(std::string name, SpacePtr observations, SpacePtr inputs, ObserveFn observe, StepFn step)
      : name_(std::move(name)),
        observations_(std::move(observations)),
        inputs_(std::move(inputs)),
        observe_(std::move(observe)),
        step_(std::move(step)) {
    if (!observations_ || !inputs_) throw std::invalid_argument("system needs observation and input spaces");
    if (!inputs_->is_scalar() || inputs_->lo() != 0)
      throw std::invalid_argument("input space must be a scalar range starting at 0");
  }

  const std::string& name() const { return name_; }
  const SpacePtr& observation_space() const { return observations_; }
  const SpacePtr& input_space() const { return inputs_; }
  std::size_t input_count() const { return static_cast<std::size_t>(inputs_->hi()) + 1; }
  Vocabulary vocabulary() const { return {observations_, inputs_}; }

  System(std::string name, SpacePtr observations, SpacePtr inputs, ObserveFn observe, ObserveIntoFn observe_into,
         StepFn step)
      : System(std::move(name), std::move(observations), std::move(inputs), std::move(observe), std::move(step)) {
    observe_into_ = std::move(observe_into);
  }

  // Never empty for a well-formed system.
  ObservationSet observe(const State& x) const { return observe_(x); }
  void observe_into(const State& x, ObservationSet& out) const {
    if (observe_into_) observe_into_(x, out);
    else out = observe_(x);
  }
  State step(const State& x, Input i) const { return step_(x, i); }

  const ObserveFn& observe_fn() const { return observe_; }
  const StepFn& step_fn() const { return step_; }

  System with_name(std::string name) const {
    System copy = *this;
    copy.name_ = std::move(name);
    return copy;
  }

  System with_step(StepFn step) const {
    System copy = *this;
    copy.step_ = std::move(step);
    return copy;
  }

  System with_observe(ObserveFn observe) const {
    System copy = *this;
    copy.observe_ = std::move(observe);
    copy.observe_into_ = {};
    return copy;
  }

 private:
  std::string name_;
  SpacePtr observations_;
  SpacePtr inputs_;
  ObserveFn observe_;
  ObserveIntoFn observe_into_;
  StepFn step_;
};

template <class State>
State iterate(const System<State>& sys, State x, std::span<const Input> word) {
  for (Input i : word) {
    if (i >= sys.input_count()) throw std::out_of_range("input outside the alphabet of " + sys.name());
    x = sys.step(x, i);
  }
  return x;
}

// The final-coalgebra image of a state, truncated to words of length at
// most depth: for every such word w, the observations after reading w.
// Words are laid out as a complete n-ary tree (root 0, child k*n + 1 + i).
class BehaviourPrefix {
 public:
  BehaviourPrefix(std::size_t depth, std::size_t input_count) : depth_(depth), inputs_(input_count) {}

  std::size_t depth() const { return depth_; }
  std::size_t input_count() const { return inputs_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t child(std::size_t node, Input i) const { return node * inputs_ + 1 + i; }
  bool is_frontier(std::size_t node) const { return child(node, 0) >= nodes_.size(); }
  const ObservationSet& at_node(std::size_t node) const { return table_[nodes_.at(node)]; }

  const ObservationSet& at(std::span<const Input> word) const {
    if (word.size() > depth_) throw std::out_of_range("word longer than the prefix depth");
    std::size_t k = 0;
    for (Input i : word) {
      if (i >= inputs_) throw std::out_of_range("input outside the alphabet");
      k = child(k, i);
    }
    return at_node(k);
  }

  friend bool operator==(const BehaviourPrefix& a, const BehaviourPrefix& b) {
    if (a.depth_ != b.depth_ || a.inputs_ != b.inputs_ || a.nodes_.size() != b.nodes_.size()) return false;
    for (std::size_t k = 0; k < a.nodes_.size(); ++k) {
      if (a.at_node(k) != b.at_node(k)) return false;
    }
    return true;
  }

  void push(const ObservationSet& observations) {
    auto [it, fresh] = index_.emplace(observations, static_cast<std::uint32_t>(table_.size()));
    if (fresh) table_.push_back(observations);
    nodes_.push_back(it->second);
  }

 private:
  std::size_t depth_;
  std::size_t inputs_;
  std::vector<std::uint32_t> nodes_;
  std::vector<ObservationSet> table_;
  std::map<ObservationSet, std::uint32_t> index_;
};

inline std::size_t prefix_node_count(std::size_t depth, std::size_t inputs) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (std::size_t d = 0; d <= depth; ++d) {
    total += level;
    if (total > (std::size_t{1} << 26)) throw std::length_error("behaviour prefix too large");
    level *= inputs;
  }
  return total;
}

template <class State>
BehaviourPrefix behaviour_prefix(const System<State>& sys, const State& x, std::size_t depth) {
  const std::size_t n = sys.input_count();
  const std::size_t total = prefix_node_count(depth, n);
  BehaviourPrefix prefix(depth, n);
  std::vector<State> states{x};
  states.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    prefix.push(sys.observe(states[k]));
    if (prefix.child(k, 0) < total) {
      for (Input i = 0; i < n; ++i) states.push_back(sys.step(states[k], i));
    }
  }
  return prefix;
}

// The truncated behaviour as a system over tree nodes. Frontier nodes loop
// on themselves, repeating their last observation.
inline System<std::uint64_t> prefix_system(std::shared_ptr<const BehaviourPrefix> prefix, SpacePtr observations,
                                           SpacePtr inputs) {
  auto observe = [prefix](const std::uint64_t& k) { return prefix->at_node(static_cast<std::size_t>(k)); };
  auto step = [prefix](const std::uint64_t& k, Input i) -> std::uint64_t {
    auto node = static_cast<std::size_t>(k);
    return prefix->is_frontier(node) ? k : prefix->child(node, i);
  };
  return System<std::uint64_t>("prefix", std::move(observations), std::move(inputs), observe, step);
}

// Nondeterministic systems: each input yields a finite set of successors.
template <class State>
struct NondetSystem {
  std::string name;
  SpacePtr observations;
  SpacePtr inputs;
  std::function<ObservationSet(const State&)> observe;
  std::function<std::vector<State>(const State&, Input)> step;
};

// Determinization by subset construction: states are sorted, duplicate-free
// sets; observations and successors are unions over members.
template <class State>
System<std::vector<State>> adapt_nondeterministic(NondetSystem<State> nd) {
  using Set = std::vector<State>;
  auto canon = [](Set s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };
  auto observe = [nd, canon](const Set& xs) {
    ObservationSet out;
    for (const auto& x : xs) {
      auto o = nd.observe(x);
      out.insert(out.end(), o.begin(), o.end());
    }
    normalize(out);
    return out;
  };
  auto step = [nd, canon](const Set& xs, Input i) {
    Set out;
    for (const auto& x : xs) {
      auto ys = nd.step(x, i);
      out.insert(out.end(), ys.begin(), ys.end());
    }
    return canon(std::move(out));
  };
  return System<Set>(nd.name, nd.observations, nd.inputs, observe, step);
}

}  // namespace coalcheck

#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "coalcheck/coalgebra.hpp"
#include "coalcheck/formula.hpp"
#include "coalcheck/hash.hpp"

namespace coalcheck {

// Preserving: (x,psi) satisfied implies beta(x,psi) satisfied.
// Reflecting: beta(x,psi) satisfied implies (x,psi) satisfied.
// Equivariant: both, and the operator is invertible.
enum class Direction { Preserving, Reflecting, Equivariant };

enum class FailureInference { Literal, Image, Both };

template <class State>
struct Pair {
  State state;
  FormulaId formula;
  bool operator==(const Pair&) const = default;
};

template <class State>
struct PairHash {
  std::size_t operator()(const Pair<State>& p) const {
    return hash_mix(StateHash<State>{}(p.state), p.formula.value);
  }
};

template <class State>
class AlgebraicOperator {
 public:
  using StateMap = std::function<State(const State&)>;
  using FormulaMap = std::function<FormulaId(FormulaId)>;
  using PairMap = std::function<Pair<State>(const Pair<State>&)>;

  // Acts on states and formulae independently. Equivariant operators must
  // supply both inverses.
  static AlgebraicOperator separable(std::string name, Direction direction, StateMap state, FormulaMap formula,
                                     StateMap inverse_state = {}, FormulaMap inverse_formula = {}) {
    AlgebraicOperator op(std::move(name), direction);
    op.state_ = std::move(state);
    op.formula_ = std::move(formula);
    op.inverse_state_ = std::move(inverse_state);
    op.inverse_formula_ = std::move(inverse_formula);
    op.check();
    return op;
  }

  static AlgebraicOperator general(std::string name, Direction direction, PairMap transform, PairMap inverse = {}) {
    AlgebraicOperator op(std::move(name), direction);
    op.pair_ = std::move(transform);
    op.inverse_pair_ = std::move(inverse);
    op.check();
    return op;
  }

  const std::string& name() const { return name_; }
  Direction direction() const { return direction_; }
  bool preserves() const { return direction_ != Direction::Reflecting; }
  bool reflects() const { return direction_ != Direction::Preserving; }
  bool equivariant() const { return direction_ == Direction::Equivariant; }
  bool is_separable() const { return static_cast<bool>(state_); }
  bool invertible() const { return is_separable() ? inverse_state_ && inverse_formula_ : static_cast<bool>(inverse_pair_); }

  Pair<State> apply(const Pair<State>& p) const {
    if (!is_separable()) return pair_(p);
    return {state_(p.state), map_formula(p.formula)};
  }

  Pair<State> apply_inverse(const Pair<State>& p) const {
    if (!invertible()) throw std::logic_error("operator " + name_ + " has no inverse");
    if (!is_separable()) return inverse_pair_(p);
    return {inverse_state_(p.state), unmap_formula(p.formula)};
  }

  State map_state(const State& x) const { return state_(x); }
  State unmap_state(const State& x) const { return inverse_state_(x); }
  FormulaId map_formula(FormulaId f) const { return cached(cache_->forward, formula_, f); }
  FormulaId unmap_formula(FormulaId f) const { return cached(cache_->backward, inverse_formula_, f); }

 private:
  struct Cache {
    std::mutex mu;
    std::unordered_map<FormulaId, FormulaId> forward;
    std::unordered_map<FormulaId, FormulaId> backward;
  };

  AlgebraicOperator(std::string name, Direction direction)
      : name_(std::move(name)), direction_(direction), cache_(std::make_shared<Cache>()) {}

  void check() const {
    if (equivariant() && !invertible())
      throw std::invalid_argument("equivariant operator " + name_ + " needs an inverse");
  }

  FormulaId cached(std::unordered_map<FormulaId, FormulaId>& map, const FormulaMap& fn, FormulaId f) const {
    {
      std::lock_guard lock(cache_->mu);
      if (auto it = map.find(f); it != map.end()) return it->second;
    }
    FormulaId g = fn(f);
    std::lock_guard lock(cache_->mu);
    map.emplace(f, g);
    return g;
  }

  std::string name_;
  Direction direction_;
  StateMap state_;
  FormulaMap formula_;
  StateMap inverse_state_;
  FormulaMap inverse_formula_;
  PairMap pair_;
  PairMap inverse_pair_;
  std::shared_ptr<Cache> cache_;
};

// Separable equivariant operator from a state bijection that acts on
// observations and inputs by bijections; formulae are mapped structurally.
template <class State>
AlgebraicOperator<State> equivariant_operator(std::string name, std::function<State(const State&)> state,
                                              std::function<State(const State&)> inverse_state,
                                              std::function<Observation(const Observation&)> observation,
                                              std::function<Observation(const Observation&)> inverse_observation,
                                              std::function<Input(Input)> input = {},
                                              std::function<Input(Input)> inverse_input = {}) {
  auto lift = [](std::function<Input(Input)> fn) -> std::function<Predicate(const Predicate&)> {
    if (!fn) return [](const Predicate& p) { return p; };
    return [fn](const Predicate& p) {
      return image(p, [fn](const Observation& o) { return Observation{static_cast<Value>(fn(static_cast<Input>(o[0])))}; });
    };
  };
  auto obs_lift = [](std::function<Observation(const Observation&)> fn) {
    return [fn](const Predicate& p) { return image(p, fn); };
  };
  auto forward = [o = obs_lift(observation), i = lift(input)](FormulaId f) { return coalcheck::map_formula(f, o, i); };
  auto backward = [o = obs_lift(inverse_observation), i = lift(inverse_input)](FormulaId f) {
    return coalcheck::map_formula(f, o, i);
  };
  return AlgebraicOperator<State>::separable(std::move(name), Direction::Equivariant, std::move(state), forward,
                                             std::move(inverse_state), backward);
}

// Forces input i: (x, psi) -> (delta(x,i), next(psi,i) & <theta(delta(x,i))>).
template <class State>
AlgebraicOperator<State> force_transition(const System<State>& sys, Input i) {
  auto transform = [sys, i](const Pair<State>& p) {
    State y = sys.step(p.state, i);
    Predicate here = Predicate::finite_set(sys.observation_space(), sys.observe(y));
    return Pair<State>{y, conj(next(p.formula, i), atom(here))};
  };
  return AlgebraicOperator<State>::general("force" + sys.input_space()->format(static_cast<Value>(i)),
                                           Direction::Preserving, transform);
}

// An explicit simulation preorder x <= y on states (y exhibits at least the
// behaviour of x). Reflexivity is implicit.
template <class State>
class StateOrder {
 public:
  void add(const State& lower, const State& upper) {
    if (lower == upper) return;
    above_[lower].push_back(upper);
    below_[upper].push_back(lower);
  }
  bool empty() const { return above_.empty(); }
  const std::vector<State>& above(const State& x) const { return lookup(above_, x); }
  const std::vector<State>& below(const State& x) const { return lookup(below_, x); }

 private:
  using Map = std::unordered_map<State, std::vector<State>, StateHash<State>>;
  static const std::vector<State>& lookup(const Map& m, const State& x) {
    static const std::vector<State> none;
    if (m.empty()) return none;
    auto it = m.find(x);
    return it == m.end() ? none : it->second;
  }
  Map above_;
  Map below_;
};

// Known verdicts: R holds satisfied pairs, F failed pairs. R and F stay
// disjoint. Per-formula counts support formula-first filtering.
template <class State>
class KnowledgeBase {
 public:
  bool satisfied(const Pair<State>& p) const { return !r_.empty() && r_.count(p) > 0; }
  bool failed(const Pair<State>& p) const { return !f_.empty() && f_.count(p) > 0; }
  bool has_satisfied_formula(FormulaId f) const { return r_formulas_.count(f) > 0; }
  bool has_failed_formula(FormulaId f) const { return f_formulas_.count(f) > 0; }
  std::size_t satisfied_formula_count() const { return r_formulas_.size(); }

  void add_satisfied(const Pair<State>& p) {
    if (failed(p)) throw std::logic_error("pair already known to fail");
    if (r_.insert(p).second) ++r_formulas_[p.formula];
  }
  void add_failed(const Pair<State>& p) {
    if (satisfied(p)) throw std::logic_error("pair already known to hold");
    if (f_.insert(p).second) ++f_formulas_[p.formula];
  }
  void merge_satisfied(const KnowledgeBase& other) {
    other.for_each_satisfied([&](const Pair<State>& p) { add_satisfied(p); });
  }

  std::size_t satisfied_size() const { return r_.size(); }
  std::size_t failed_size() const { return f_.size(); }

  template <class Fn>
  void for_each_satisfied(Fn&& fn) const {
    for (const auto& p : r_) fn(p);
  }
  template <class Fn>
  void for_each_failed(Fn&& fn) const {
    for (const auto& p : f_) fn(p);
  }

 private:
  std::unordered_set<Pair<State>, PairHash<State>> r_;
  std::unordered_set<Pair<State>, PairHash<State>> f_;
  std::unordered_map<FormulaId, std::size_t> r_formulas_;
  std::unordered_map<FormulaId, std::size_t> f_formulas_;
};

template <class State>
struct ClosureConfig {
  std::vector<AlgebraicOperator<State>> operators;
  StateOrder<State> order;
  Implication implication;
  unsigned depth = 1;
  FailureInference failure_inference = FailureInference::Both;
};

// How an inferred verdict follows from a known pair.
template <class State>
struct Derivation {
  std::string rule;
  Pair<State> known;
};

namespace detail {

// All operator sequences of length 1..depth over the selected operators.
template <class State, class Keep>
std::vector<std::vector<std::size_t>> chains(const ClosureConfig<State>& cfg, Keep keep) {
  std::vector<std::size_t> ops;
  for (std::size_t k = 0; k < cfg.operators.size(); ++k) {
    if (keep(cfg.operators[k])) ops.push_back(k);
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::vector<std::size_t>> level{{}};
  for (unsigned d = 1; d <= cfg.depth && !ops.empty(); ++d) {
    std::vector<std::vector<std::size_t>> grown;
    for (const auto& c : level) {
      for (std::size_t k : ops) {
        auto e = c;
        e.push_back(k);
        grown.push_back(std::move(e));
      }
    }
    if (out.size() + grown.size() > 100000) throw std::invalid_argument("closure depth too large for operator set");
    out.insert(out.end(), grown.begin(), grown.end());
    level = std::move(grown);
  }
  return out;
}

template <class State>
std::string chain_name(const ClosureConfig<State>& cfg, const std::vector<std::size_t>& chain) {
  std::string out;
  for (std::size_t k : chain) out += (out.empty() ? "" : ".") + cfg.operators[k].name();
  return out;
}

}  // namespace detail

// Members of the up-to closure of {pair}, using operators whose direction
// includes the given one, then the order and implication rules. For the
// Reflecting direction the rules run the other way (failure propagation).
template <class State>
std::vector<Pair<State>> closure_members(const Pair<State>& pair, const ClosureConfig<State>& cfg,
                                         Direction direction) {
  bool up = direction != Direction::Reflecting;
  std::unordered_set<Pair<State>, PairHash<State>> seen{pair};
  std::vector<Pair<State>> ops_closed{pair};
  std::vector<Pair<State>> level{pair};
  for (unsigned d = 0; d < cfg.depth; ++d) {
    std::vector<Pair<State>> grown;
    for (const auto& p : level) {
      for (const auto& op : cfg.operators) {
        bool usable = direction == Direction::Equivariant ? op.equivariant() : (up ? op.preserves() : op.reflects());
        if (!usable) continue;
        auto q = op.apply(p);
        if (seen.insert(q).second) {
          grown.push_back(q);
          ops_closed.push_back(q);
        }
      }
    }
    level = std::move(grown);
  }
  std::vector<Pair<State>> out;
  std::unordered_set<Pair<State>, PairHash<State>> emitted;
  for (const auto& p : ops_closed) {
    std::vector<State> states{p.state};
    const auto& related = up ? cfg.order.below(p.state) : cfg.order.above(p.state);
    states.insert(states.end(), related.begin(), related.end());
    std::vector<FormulaId> formulas{p.formula};
    const auto& implied = up ? cfg.implication.implied(p.formula) : cfg.implication.implicants(p.formula);
    formulas.insert(formulas.end(), implied.begin(), implied.end());
    for (const auto& x : states) {
      for (FormulaId f : formulas) {
        Pair<State> q{x, f};
        if (emitted.insert(q).second) out.push_back(q);
      }
    }
  }
  return out;
}

// Verdict inference for one verification run. Holds references to the
// committed knowledge (fixed for the run) and the run's tentative R.
//
// Satisfaction: (x,psi) is derived from (y,psi0) with x <= y, psi0 ~> psi,
// and (y,psi0) in R, in an equivariant image of R (checked by inverting the
// operators, valid against the tentative R too) or in the forward image of
// the committed R under preserving operators.
//
// Failure: direction (a) maps the pair forward under preserving operators and
// the rules and meets F; direction (b) looks for the pair in the image of F
// under equivariant or reflecting operators. In Both mode (a) leaves the
// equivariant operators to (b).
template <class State>
class Inference {
 public:
  Inference(const ClosureConfig<State>& cfg, const KnowledgeBase<State>& committed,
            const KnowledgeBase<State>& tentative)
      : cfg_(cfg), kb_(committed), tentative_(tentative) {
    equivariant_ = detail::chains(cfg, [](const auto& op) { return op.equivariant(); });
    bool literal = cfg.failure_inference != FailureInference::Image;
    bool image = cfg.failure_inference != FailureInference::Literal;
    if (literal) {
      bool all = cfg.failure_inference == FailureInference::Literal;
      literal_ = detail::chains(cfg, [all](const auto& op) { return op.preserves() && (all || !op.equivariant()); });
    }
    if (image) {
      image_enabled_ = true;
      reflecting_only_ = detail::chains(cfg, [](const auto& op) { return op.reflects() && !op.equivariant(); });
    }
    preserving_only_ = detail::chains(cfg, [](const auto& op) { return op.preserves() && !op.equivariant(); });
  }

  std::optional<Derivation<State>> infer_satisfied(const Pair<State>& p) {
    if (!preserving_only_.empty() && !r_images_) build_r_images();
    std::optional<Derivation<State>> found;
    visit_implicants(p, [&](const State& x, FormulaId f, const char* rule) {
      const SatInfo& info = sat_info(f);
      Pair<State> q{x, f};
      if ((info.committed && kb_.satisfied(q)) || tentative_.satisfied(q)) {
        found = Derivation<State>{rule, q};
        return true;
      }
      if (r_images_ && r_images_->count(q)) {
        found = Derivation<State>{std::string(rule) + "+preserving-image", q};
        return true;
      }
      for (const auto& [chain, source] : info.candidates) {
        Pair<State> r{invert_state(*chain, x), source};
        if (kb_.satisfied(r) || tentative_.satisfied(r)) {
          found = Derivation<State>{"image:" + detail::chain_name(cfg_, *chain), r};
          return true;
        }
      }
      return false;
    });
    return found;
  }

  std::optional<Derivation<State>> infer_failed(const Pair<State>& p) {
    const FailInfo& info = fail_info(p.formula);
    if (info.direct && kb_.failed(p)) return Derivation<State>{"known", p};
    if (image_enabled_) {
      for (const auto& [chain, source] : info.candidates) {
        Pair<State> r{invert_state(*chain, p.state), source};
        if (kb_.failed(r)) return Derivation<State>{"image:" + detail::chain_name(cfg_, *chain), r};
      }
      if (!reflecting_only_.empty()) {
        if (!f_images_) build_f_images();
        if (f_images_->count(p)) return Derivation<State>{"reflecting-image", p};
      }
    }
    if (cfg_.failure_inference != FailureInference::Image) {
      if (info.literal) {
        if (auto d = literal_failure(p)) return d;
      }
      for (const auto& chain : literal_) {
        Pair<State> q = p;
        for (std::size_t k : chain) q = cfg_.operators[k].apply(q);
        if (fail_info(q.formula).literal) {
          if (auto d = literal_failure(q)) return d;
        }
      }
    }
    return std::nullopt;
  }

 private:
  using Chain = std::vector<std::size_t>;
  using Candidates = std::vector<std::pair<const Chain*, FormulaId>>;

  // Per-formula facts about the committed F, fixed for the run.
  struct FailInfo {
    bool direct = false;   // F has pairs on this formula
    bool literal = false;  // F has pairs on this formula or one it implies
    Candidates candidates; // equivariant chains whose inverse image meets F
  };

  // Per-formula facts about R; candidates follow the tentative R's formulas.
  struct SatInfo {
    bool committed = false;
    std::size_t version = 0;
    Candidates candidates;
  };

  const FailInfo& fail_info(FormulaId f) {
    if (last_fail_ && last_fail_formula_ == f) return *last_fail_;
    auto [it, fresh] = fail_cache_.try_emplace(f);
    if (fresh) {
      FailInfo& info = it->second;
      info.direct = kb_.has_failed_formula(f);
      info.literal = info.direct;
      for (FormulaId g : cfg_.implication.implied(f)) info.literal = info.literal || kb_.has_failed_formula(g);
      if (image_enabled_) {
        for (const auto& chain : equivariant_) {
          if (!separable(chain)) throw std::invalid_argument("equivariant operators must be separable");
          FormulaId source = invert_formula(chain, f);
          if (kb_.has_failed_formula(source)) info.candidates.emplace_back(&chain, source);
        }
      }
    }
    last_fail_formula_ = f;
    last_fail_ = &it->second;
    return it->second;
  }

  const SatInfo& sat_info(FormulaId f) {
    SatInfo* info = nullptr;
    if (last_sat_ && last_sat_formula_ == f) {
      info = last_sat_;
    } else {
      auto [it, fresh] = sat_cache_.try_emplace(f);
      info = &it->second;
      if (fresh) info->committed = kb_.has_satisfied_formula(f);
      last_sat_formula_ = f;
      last_sat_ = info;
    }
    std::size_t version = tentative_.satisfied_formula_count() + 1;
    if (info->version != version) {
      info->version = version;
      info->candidates.clear();
      for (const auto& chain : equivariant_) {
        if (!separable(chain)) throw std::invalid_argument("equivariant operators must be separable");
        FormulaId source = invert_formula(chain, f);
        if (kb_.has_satisfied_formula(source) || tentative_.has_satisfied_formula(source))
          info->candidates.emplace_back(&chain, source);
      }
    }
    return *info;
  }

  template <class Fn>
  void visit_implicants(const Pair<State>& p, Fn&& fn) {
    auto visit = [&](FormulaId f, const char* rule) {
      if (fn(p.state, f, rule)) return true;
      for (const auto& y : cfg_.order.above(p.state)) {
        if (fn(y, f, "order")) return true;
      }
      return false;
    };
    if (visit(p.formula, "known")) return;
    for (FormulaId f : cfg_.implication.implicants(p.formula)) {
      if (visit(f, "implication")) return;
    }
  }

  // Direction (a) for one member of the preserving closure: the member, or
  // a smaller state or weaker formula, is known to fail.
  std::optional<Derivation<State>> literal_failure(const Pair<State>& m) const {
    auto test = [&](FormulaId f) -> std::optional<Derivation<State>> {
      if (!kb_.has_failed_formula(f)) return std::nullopt;
      if (kb_.failed({m.state, f})) return Derivation<State>{"literal", Pair<State>{m.state, f}};
      for (const auto& x : cfg_.order.below(m.state)) {
        if (kb_.failed({x, f})) return Derivation<State>{"literal+order", Pair<State>{x, f}};
      }
      return std::nullopt;
    };
    if (auto d = test(m.formula)) return d;
    for (FormulaId f : cfg_.implication.implied(m.formula)) {
      if (auto d = test(f)) return d;
    }
    return std::nullopt;
  }

  State invert_state(const Chain& chain, State x) const {
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) x = cfg_.operators[*it].unmap_state(x);
    return x;
  }

  FormulaId invert_formula(const Chain& chain, FormulaId f) const {
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) f = cfg_.operators[*it].unmap_formula(f);
    return f;
  }

  bool separable(const Chain& chain) const {
    for (std::size_t k : chain) {
      if (!cfg_.operators[k].is_separable()) return false;
    }
    return true;
  }

  void build_r_images() {
    r_images_.emplace();
    auto chains = detail::chains(cfg_, [](const auto& op) { return op.preserves(); });
    kb_.for_each_satisfied([&](const Pair<State>& r) {
      for (const auto& chain : chains) {
        Pair<State> q = r;
        for (std::size_t k : chain) q = cfg_.operators[k].apply(q);
        r_images_->insert(q);
      }
    });
  }

  void build_f_images() {
    f_images_.emplace();
    auto chains = detail::chains(cfg_, [](const auto& op) { return op.reflects(); });
    kb_.for_each_failed([&](const Pair<State>& r) {
      for (const auto& chain : chains) {
        Pair<State> q = r;
        for (std::size_t k : chain) q = cfg_.operators[k].apply(q);
        f_images_->insert(q);
      }
    });
  }

  const ClosureConfig<State>& cfg_;
  const KnowledgeBase<State>& kb_;
  const KnowledgeBase<State>& tentative_;
  std::vector<Chain> equivariant_;
  std::vector<Chain> literal_;
  std::vector<Chain> reflecting_only_;
  std::vector<Chain> preserving_only_;
  bool image_enabled_ = false;
  std::unordered_map<FormulaId, FailInfo> fail_cache_;
  std::unordered_map<FormulaId, SatInfo> sat_cache_;
  FormulaId last_fail_formula_;
  FailInfo* last_fail_ = nullptr;
  FormulaId last_sat_formula_;
  SatInfo* last_sat_ = nullptr;
  std::optional<std::unordered_set<Pair<State>, PairHash<State>>> r_images_;
  std::optional<std::unordered_set<Pair<State>, PairHash<State>>> f_images_;
};

// One-shot queries against a knowledge base (no tentative relation).
template <class State>
bool infer_satisfied(const Pair<State>& p, const KnowledgeBase<State>& kb, const ClosureConfig<State>& cfg) {
  KnowledgeBase<State> none;
  Inference<State> inference(cfg, kb, none);
  return inference.infer_satisfied(p).has_value();
}

template <class State>
bool infer_failed(const Pair<State>& p, const KnowledgeBase<State>& kb, const ClosureConfig<State>& cfg) {
  KnowledgeBase<State> none;
  Inference<State> inference(cfg, kb, none);
  return inference.infer_failed(p).has_value();
}

}  // namespace coalcheck

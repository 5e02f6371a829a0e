#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coalcheck/predicate.hpp"

namespace coalcheck {

using Input = std::uint32_t;

// Index into the process-wide hash-consed formula store. Structurally equal
// formulae always share one id.
struct FormulaId {
  std::uint32_t value = 0;
  auto operator<=>(const FormulaId&) const = default;
};

}  // namespace coalcheck

template <>
struct std::hash<coalcheck::FormulaId> {
  std::size_t operator()(coalcheck::FormulaId f) const noexcept { return f.value; }
};

namespace coalcheck {

enum class FormulaKind { True, Var, Box, Obs, And, Nu };

// Var uses de Bruijn indices: Var(k) is bound by the k-th enclosing Nu.
struct FormulaNode {
  FormulaKind kind = FormulaKind::True;
  std::uint32_t var = 0;
  std::optional<Predicate> predicate;  // Box: inputs, Obs: observations
  FormulaId left;                      // Box, Nu: body; And: first conjunct
  FormulaId right;                     // And: second conjunct
  std::uint32_t free_bound = 0;        // one past the largest free index; 0 when closed
  std::vector<std::uint32_t> unguarded;  // free indices reachable without crossing a Box
  std::uint64_t structural = 0;        // deterministic structural hash
};

FormulaId tt();
FormulaId var(std::uint32_t index);
// A universe input predicate is stored unplaced, so [I] is one formula
// whatever the input alphabet.
FormulaId box(const Predicate& inputs, FormulaId body);
// <O> normalizes to tt.
FormulaId atom(const Predicate& observations);
// Flattens, drops tt, removes duplicates and orders conjuncts canonically.
FormulaId conj(FormulaId a, FormulaId b);
FormulaId conj(std::span<const FormulaId> parts);
// Throws std::invalid_argument when the bound variable occurs unguarded.
FormulaId nu(FormulaId body);
// G phi = nu v. phi & [I] v, for closed phi.
FormulaId always(FormulaId body);

const FormulaNode& node(FormulaId f);
std::vector<FormulaId> conjuncts(FormulaId f);
bool is_closed(FormulaId f);
FormulaId unfold(FormulaId f);
std::size_t store_size();

// Table-driven semantics on closed formulae.
Predicate obs(FormulaId f);
FormulaId next(FormulaId f, Input i);
std::vector<FormulaId> reachable(FormulaId f, std::size_t input_count);
std::size_t size(FormulaId f, std::size_t input_count);

// Rebuilds f with every observation and input predicate mapped.
FormulaId map_formula(FormulaId f, const std::function<Predicate(const Predicate&)>& obs_map,
                      const std::function<Predicate(const Predicate&)>& input_map);

// Deterministic total order used for canonical conjunct order.
bool structurally_less(FormulaId a, FormulaId b);

// A relation a ~> b between formulae, read "a implies b". Reflexivity is
// implicit and not stored.
class Implication {
 public:
  void add(FormulaId a, FormulaId b);
  bool implies(FormulaId a, FormulaId b) const;
  const std::vector<FormulaId>& implied(FormulaId a) const;
  const std::vector<FormulaId>& implicants(FormulaId b) const;
  std::size_t size() const { return count_; }
  std::vector<std::pair<FormulaId, FormulaId>> pairs() const;

 private:
  std::unordered_map<FormulaId, std::vector<FormulaId>> forward_;
  std::unordered_map<FormulaId, std::vector<FormulaId>> backward_;
  std::size_t count_ = 0;
};

// Greatest simulation on the formula coalgebra reachable from the roots
// (plus tt): a ~> b iff obs(a) is within obs(b) and next(a,i) ~> next(b,i).
Implication formula_similarity(std::span<const FormulaId> roots, std::size_t input_count);

// Spaces that give meaning to literals in formula text.
struct Vocabulary {
  SpacePtr observations;
  SpacePtr inputs;
};

enum class Polarity { Assert, Refute };

// Assert: the initial state satisfies body. Refute: it does not.
struct Property {
  std::string name;
  Polarity polarity = Polarity::Assert;
  FormulaId body;
};

}  // namespace coalcheck

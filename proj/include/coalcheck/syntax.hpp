#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "coalcheck/formula.hpp"
#include "coalcheck/predicate.hpp"

namespace coalcheck {

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::invalid_argument(message + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Predicates: `tt`, `ff`, `!p`, `(p & q)`, `. = v`, `. != v`, `. <= v`,
// `. in {a, b}`, `. in [lo, hi]`, tuples `(. >= 2, _, . = true)`, named
// components `t >= 200`, and linear relations `p = 5*t`.
Predicate parse_predicate(std::string_view text, const SpacePtr& space);
std::string format_predicate(const Predicate& p);

// Formulae: `tt`, `<pred>`, `[inputs] phi`, `phi & psi`, `G phi`,
// `nu v. phi`, `v`, `(phi)`. Inputs are `*`, `a, b`, `!a` or a predicate.
FormulaId parse_formula(std::string_view text, const Vocabulary& vocabulary);
std::string format_formula(FormulaId f, const Vocabulary& vocabulary);

// Properties: a formula (assert), `!phi` (refute) or `F <pred>`, read as
// "not G <not pred>".
Property parse_property(std::string_view text, const Vocabulary& vocabulary, std::string name = {});
std::string format_property(const Property& p, const Vocabulary& vocabulary);

}  // namespace coalcheck

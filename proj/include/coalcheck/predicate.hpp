#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coalcheck {

using Value = std::int64_t;

// A point of an observation space. Scalar spaces use one coordinate,
// product spaces one coordinate per component.
using Observation = std::vector<Value>;

// Sorted, duplicate-free set of observations.
using ObservationSet = std::vector<Observation>;

void normalize(ObservationSet& set);

class SpaceMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when no exact decision procedure applies. Callers never receive
// an approximate answer instead.
class Undecidable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ObservationSpace;
using SpacePtr = std::shared_ptr<const ObservationSpace>;

// Every scalar space is a finite integer range [lo, hi]. Enumerated spaces
// hold codes (optionally labelled), scaled spaces count quanta of
// 10^-decimals, booleans are {0, 1}. Products combine scalar components.
class ObservationSpace {
 public:
  enum class Kind { Enumerated, Scaled, Boolean, Product };

  static SpacePtr enumerated(std::string name, Value lo, Value hi, int pad_width = 0);
  static SpacePtr labelled(std::string name, std::vector<std::string> labels);
  static SpacePtr scaled(std::string name, Value lo, Value hi, int decimals);
  static SpacePtr boolean(std::string name);
  static SpacePtr product(std::string name, std::vector<SpacePtr> components);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool is_scalar() const { return kind_ != Kind::Product; }
  std::size_t arity() const { return is_scalar() ? 1 : components_.size(); }
  Value lo() const { return lo_; }
  Value hi() const { return hi_; }
  int decimals() const { return decimals_; }
  const std::vector<SpacePtr>& components() const { return components_; }
  const SpacePtr& component(std::size_t i) const { return components_.at(i); }
  std::optional<std::size_t> component_index(std::string_view name) const;

  // Number of points, saturating at UINT64_MAX.
  std::uint64_t cardinality() const;
  bool contains(const Observation& o) const;

  // Scalar value rendering and parsing (labels, padding, decimals).
  std::string format(Value v) const;
  Value parse_value(std::string_view text) const;
  // Same notation without the range check, for comparison bounds.
  Value parse_bound(std::string_view text) const;
  std::string format(const Observation& o) const;

 private:
  ObservationSpace() = default;

  Kind kind_ = Kind::Enumerated;
  std::string name_;
  Value lo_ = 0;
  Value hi_ = 0;
  int pad_width_ = 0;
  int decimals_ = 0;
  std::vector<std::string> labels_;
  std::vector<SpacePtr> components_;
};

bool same_space(const SpacePtr& a, const SpacePtr& b);

// Immutable predicate over an observation space. A null space marks the
// space-polymorphic top/bottom produced by formulas that do not constrain
// observations; it adopts the space of whatever it is combined with.
class Predicate {
 public:
  enum class Kind { Empty, Universe, FiniteSet, Interval, Complement, Product, Intersection, Linear };

  static Predicate empty(SpacePtr space = nullptr);
  static Predicate universe(SpacePtr space = nullptr);
  static Predicate finite_set(SpacePtr space, ObservationSet values);
  static Predicate singleton(SpacePtr space, Observation value);
  static Predicate interval(SpacePtr space, Value lo, Value hi);
  static Predicate product(SpacePtr space, std::vector<Predicate> parts);
  // Points whose component `target` equals factor * component `source`.
  static Predicate linear(SpacePtr space, std::size_t target, Value factor, std::size_t source);

  Kind kind() const;
  const SpacePtr& space() const;
  const ObservationSet& values() const;
  Value lo() const;
  Value hi() const;
  const std::vector<Predicate>& parts() const;
  const Predicate& inner() const;
  std::size_t target() const;
  std::size_t source() const;
  Value factor() const;
  std::size_t hash() const;

  bool is_universe() const { return kind() == Kind::Universe; }
  bool is_empty_literal() const { return kind() == Kind::Empty; }

  friend bool operator==(const Predicate& a, const Predicate& b);
  friend bool operator!=(const Predicate& a, const Predicate& b) { return !(a == b); }

  struct Node;

 private:
  explicit Predicate(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend Predicate make_predicate(Node node);

  std::shared_ptr<const Node> node_;
};

struct PredicateHash {
  std::size_t operator()(const Predicate& p) const { return p.hash(); }
};

bool member(const Predicate& p, const Observation& o);
bool is_empty(const Predicate& p);
bool subset(const Predicate& p, const Predicate& q);
Predicate intersect(const Predicate& p, const Predicate& q);
Predicate complement(const Predicate& p);

// Image under a bijection of the space onto itself. Membership-preserving
// for bijections; throws Undecidable when a variant cannot be mapped exactly.
Predicate image(const Predicate& p, const std::function<Observation(const Observation&)>& bijection);

// Sorted disjoint closed intervals. Exact normal form of scalar predicates.
using IntervalSet = std::vector<std::pair<Value, Value>>;
IntervalSet to_intervals(const Predicate& p);

}  // namespace coalcheck

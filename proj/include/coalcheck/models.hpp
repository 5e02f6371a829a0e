#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coalcheck/attacker.hpp"
#include "coalcheck/closure.hpp"
#include "coalcheck/coalgebra.hpp"
#include "coalcheck/formula.hpp"

namespace coalcheck {

// A single dial 0..9 that advances on its one input.
struct DialModel {
  DialModel();
  System<int> system() const;
  int initial() const { return 0; }
  // F <. = n>.
  Property reach(int n) const;
  // Observation forced to {0}.
  Attack<int> observe_zero() const;
  // Every transition lands on 0 (pre-composes with "go to 9").
  Attack<int> transition_to_zero() const;
  // Every transition advances twice.
  Attack<int> skip() const;

  SpacePtr observations;
  SpacePtr inputs;
};

// Lock of `digits` dials; input i advances dial i (dial 0 is leftmost).
// States are the displayed codes.
class LockModel {
 public:
  using State = std::uint32_t;

  explicit LockModel(int digits = 4);
  int digits() const { return digits_; }
  State state_count() const { return states_; }
  System<State> system() const;
  State initial() const { return 0; }

  State shift(State x, int times = 1) const;  // rotate dials right
  State add(State x, int times = 1) const;    // advance the rightmost dial
  int digit(State x, int position) const;

  // shift^k relabels inputs (i -> i+k) so that it commutes with dynamics for
  // every formula; add^k commutes as is.
  AlgebraicOperator<State> shift_operator(int times = 1) const;
  AlgebraicOperator<State> add_operator(int times = 1) const;
  // Names: shift, shift2, ..., add, add2, ... add9.
  AlgebraicOperator<State> named_operator(const std::string& name) const;

  // F <. = n>, the target n in ascending order.
  Property reach(State n) const;
  std::vector<Property> reach_all() const;

  SpacePtr observations;
  SpacePtr inputs;

 private:
  int digits_;
  State states_;
};

// Two processes sharing a counter c (a BEEM-style puzzle). Each process runs
// Q -> R -> S -> Q; Q -> R needs c < MAX and copies c, R -> S adds c to its
// local copy, S -> Q publishes its copy into c.
struct PuzzleState {
  enum Pc : std::uint8_t { Q, R, S };
  Pc pc1 = Q;
  std::int64_t n1 = 0;
  Pc pc2 = Q;
  std::int64_t n2 = 0;
  std::int64_t c = 1;
  bool operator==(const PuzzleState&) const = default;
  auto operator<=>(const PuzzleState&) const = default;
};
std::size_t hash_value(const PuzzleState& s);

class PuzzleModel {
 public:
  explicit PuzzleModel(std::int64_t max);
  std::int64_t max() const { return max_; }
  System<PuzzleState> system() const;
  PuzzleState initial() const { return {}; }
  // Exchanges the two processes (and the two inputs).
  static PuzzleState swap(const PuzzleState& s);
  AlgebraicOperator<PuzzleState> swap_operator() const;
  // F <. = n>: some run makes the counter n.
  Property reach(std::int64_t n) const;

  SpacePtr observations;
  SpacePtr inputs;

 private:
  std::int64_t max_;
};

// Process 1 of the water treatment testbed, in hundredths: true level t,
// sensor readings lit and hg, the controller's latched valve command and
// alarm flag, and the valve. Sensors, controller and valve are unit-delay
// components composed in sequence.
struct SwatState {
  std::int64_t t = 0;
  std::int64_t lit = 0;
  std::int64_t hg = 0;
  bool command_open = true;
  bool valve_open = true;
  bool consistent = true;
  bool operator==(const SwatState&) const = default;
  auto operator<=>(const SwatState&) const = default;
};
std::size_t hash_value(const SwatState& s);

struct SwatParams {
  std::int64_t g = 5;
  int decimals = 2;  // quantum 10^-decimals
  double capacity = 1200;
  double inflow = 0.46;
  double outflow = 0.44;
  double open_below = 500;
  double close_at = 800;
  double initial_level = 500;
  double bias = 200;
  double stealth_bias = 500;
};

class SwatModel {
 public:
  explicit SwatModel(SwatParams params = {});
  const SwatParams& params() const { return params_; }
  std::int64_t quanta(double units) const;  // exact or throws
  System<SwatState> system() const;
  SwatState initial() const;

  FormulaId hydro() const;
  FormulaId lvl() const;
  FormulaId hg() const;
  FormulaId con() const;
  // Obligations [Lvl, Hg, Con]; Lvl is checked as Hydro & Lvl since
  // Hydro holds by construction.
  std::vector<Property> obligations() const;
  Implication implication() const;

  Attack<SwatState> surge_up() const;
  Attack<SwatState> bias(double b) const;
  Attack<SwatState> stealthy(double b) const;
  // kind: surge_up | bias | stealthy; param "b" in level units.
  Attack<SwatState> attack(const std::string& kind, const std::optional<double>& b) const;
  // alpha = {SurgeUp}, beta = {Bias_b}, gamma = {Stealthy_b}.
  std::vector<Attacker<SwatState>> standard_attackers() const;

  SpacePtr observations;
  SpacePtr inputs;

 private:
  SwatParams params_;
  std::int64_t capacity_;
  std::int64_t inflow_;
  std::int64_t outflow_;
  std::int64_t open_below_;
  std::int64_t close_at_;
  std::int64_t initial_;
};

}  // namespace coalcheck

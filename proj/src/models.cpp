#include "coalcheck/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coalcheck/hash.hpp"
#include "coalcheck/syntax.hpp"

namespace coalcheck {

namespace {

Property eventually(const SpacePtr& space, Observation target, std::string name) {
  Property p;
  p.name = std::move(name);
  p.polarity = Polarity::Refute;
  p.body = always(atom(complement(Predicate::singleton(space, std::move(target)))));
  return p;
}

Observation identity_observation(const Observation& o) { return o; }

}  // namespace

// ---------------------------------------------------------------- dial

DialModel::DialModel()
    : observations(ObservationSpace::enumerated("dial", 0, 9)),
      inputs(ObservationSpace::labelled("input", {"tick"})) {}

System<int> DialModel::system() const {
  return System<int>(
      "dial", observations, inputs, [](const int& n) { return ObservationSet{{n}}; },
      [](const int& n, Input) { return (n + 1) % 10; });
}

Property DialModel::reach(int n) const { return eventually(observations, {n}, "F <. = " + std::to_string(n) + ">"); }

Attack<int> DialModel::observe_zero() const {
  return {"observe-zero", [](const int&, const ObservationSet&) { return ObservationSet{{0}}; }, {}};
}

Attack<int> DialModel::transition_to_zero() const { return {"transition-zero", {}, [](const int&) { return 9; }}; }

Attack<int> DialModel::skip() const { return {"skip", {}, [](const int& n) { return (n + 1) % 10; }}; }

// ---------------------------------------------------------------- lock

LockModel::LockModel(int digits) : digits_(digits) {
  if (digits < 1 || digits > 8) throw std::invalid_argument("lock digit count must be within 1..8");
  states_ = 1;
  for (int i = 0; i < digits; ++i) states_ *= 10;
  observations = ObservationSpace::enumerated("code", 0, states_ - 1, digits);
  inputs = ObservationSpace::enumerated("dial", 0, digits - 1);
}

int LockModel::digit(State x, int position) const {
  for (int k = position + 1; k < digits_; ++k) x /= 10;
  return static_cast<int>(x % 10);
}

System<LockModel::State> LockModel::system() const {
  const int d = digits_;
  std::vector<State> place(static_cast<std::size_t>(d));
  State unit = 1;
  for (int i = d - 1; i >= 0; --i) {
    place[static_cast<std::size_t>(i)] = unit;
    unit *= 10;
  }
  auto step = [place](const State& x, Input i) {
    State p = place[i];
    State digit = (x / p) % 10;
    return digit == 9 ? x - 9 * p : x + p;
  };
  auto observe_into = [](const State& x, ObservationSet& out) {
    out.resize(1);
    out[0].assign(1, static_cast<Value>(x));
  };
  return System<State>(
      "lock", observations, inputs, [](const State& x) { return ObservationSet{{static_cast<Value>(x)}}; },
      observe_into, step);
}

LockModel::State LockModel::shift(State x, int times) const {
  State top = states_ / 10;
  for (int k = 0; k < times; ++k) x = (x % 10) * top + x / 10;
  return x;
}

LockModel::State LockModel::add(State x, int times) const {
  State last = x % 10;
  return x - last + (last + static_cast<State>(times)) % 10;
}

AlgebraicOperator<LockModel::State> LockModel::shift_operator(int times) const {
  const int d = digits_;
  int k = ((times % d) + d) % d;
  int back = (d - k) % d;
  auto self = *this;
  auto obs = [self, k](const Observation& o) {
    return Observation{static_cast<Value>(self.shift(static_cast<State>(o[0]), k))};
  };
  auto obs_inv = [self, back](const Observation& o) {
    return Observation{static_cast<Value>(self.shift(static_cast<State>(o[0]), back))};
  };
  std::string name = times == 1 ? "shift" : "shift" + std::to_string(times);
  return equivariant_operator<State>(
      name, [self, k](const State& x) { return self.shift(x, k); },
      [self, back](const State& x) { return self.shift(x, back); }, obs, obs_inv,
      [d, k](Input i) { return static_cast<Input>((static_cast<int>(i) + k) % d); },
      [d, back](Input i) { return static_cast<Input>((static_cast<int>(i) + back) % d); });
}

AlgebraicOperator<LockModel::State> LockModel::add_operator(int times) const {
  int k = ((times % 10) + 10) % 10;
  int back = (10 - k) % 10;
  auto self = *this;
  auto obs = [self, k](const Observation& o) {
    return Observation{static_cast<Value>(self.add(static_cast<State>(o[0]), k))};
  };
  auto obs_inv = [self, back](const Observation& o) {
    return Observation{static_cast<Value>(self.add(static_cast<State>(o[0]), back))};
  };
  std::string name = times == 1 ? "add" : "add" + std::to_string(times);
  return equivariant_operator<State>(
      name, [self, k](const State& x) { return self.add(x, k); },
      [self, back](const State& x) { return self.add(x, back); }, obs, obs_inv);
}

AlgebraicOperator<LockModel::State> LockModel::named_operator(const std::string& name) const {
  auto power = [&](std::size_t prefix) {
    if (name.size() == prefix) return 1;
    std::string rest = name.substr(prefix);
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), ::isdigit))
      throw std::invalid_argument("unknown lock operator '" + name + "'");
    return std::stoi(rest);
  };
  if (name.rfind("shift", 0) == 0) {
    int k = power(5);
    if (k < 1 || k >= digits_) throw std::invalid_argument("shift power out of range in '" + name + "'");
    return shift_operator(k);
  }
  if (name.rfind("add", 0) == 0) {
    int k = power(3);
    if (k < 1 || k > 9) throw std::invalid_argument("add power out of range in '" + name + "'");
    return add_operator(k);
  }
  throw std::invalid_argument("unknown lock operator '" + name + "'");
}

Property LockModel::reach(State n) const {
  return eventually(observations, {static_cast<Value>(n)}, "F <. = " + observations->format(static_cast<Value>(n)) + ">");
}

std::vector<Property> LockModel::reach_all() const {
  std::vector<Property> out;
  out.reserve(states_);
  for (State n = 0; n < states_; ++n) out.push_back(reach(n));
  return out;
}

// ---------------------------------------------------------------- puzzle

std::size_t hash_value(const PuzzleState& s) {
  std::size_t h = hash_mix(s.pc1, static_cast<std::size_t>(s.n1));
  h = hash_mix(h, s.pc2);
  h = hash_mix(h, static_cast<std::size_t>(s.n2));
  return hash_mix(h, static_cast<std::size_t>(s.c));
}

PuzzleModel::PuzzleModel(std::int64_t max)
    : observations(ObservationSpace::enumerated("c", 0, std::int64_t{1} << 40)),
      inputs(ObservationSpace::labelled("process", {"1", "2"})),
      max_(max) {
  if (max < 0) throw std::invalid_argument("puzzle MAX must be non-negative");
}

System<PuzzleState> PuzzleModel::system() const {
  const std::int64_t max = max_;
  auto local = [max](PuzzleState::Pc& pc, std::int64_t& n, std::int64_t c) {
    switch (pc) {
      case PuzzleState::Q:
        if (c < max) {
          pc = PuzzleState::R;
          n = c;
        }
        break;
      case PuzzleState::R:
        pc = PuzzleState::S;
        n = n + c;
        break;
      case PuzzleState::S:
        pc = PuzzleState::Q;
        break;
    }
  };
  auto step = [local](const PuzzleState& x, Input i) {
    PuzzleState y = x;
    auto& pc = i == 0 ? y.pc1 : y.pc2;
    auto& n = i == 0 ? y.n1 : y.n2;
    bool publish = pc == PuzzleState::S;
    local(pc, n, x.c);
    if (publish) y.c = n;
    return y;
  };
  auto observe_into = [](const PuzzleState& x, ObservationSet& out) {
    out.resize(1);
    out[0].assign(1, x.c);
  };
  return System<PuzzleState>(
      "puzzle", observations, inputs, [](const PuzzleState& x) { return ObservationSet{{x.c}}; }, observe_into, step);
}

PuzzleState PuzzleModel::swap(const PuzzleState& s) { return {s.pc2, s.n2, s.pc1, s.n1, s.c}; }

AlgebraicOperator<PuzzleState> PuzzleModel::swap_operator() const {
  auto flip = [](Input i) { return static_cast<Input>(1 - i); };
  return equivariant_operator<PuzzleState>("swap", swap, swap, identity_observation, identity_observation, flip, flip);
}

Property PuzzleModel::reach(std::int64_t n) const { return eventually(observations, {n}, "F <. = " + std::to_string(n) + ">"); }

// ---------------------------------------------------------------- water treatment

std::size_t hash_value(const SwatState& s) {
  std::size_t h = hash_mix(static_cast<std::size_t>(s.t), static_cast<std::size_t>(s.lit));
  h = hash_mix(h, static_cast<std::size_t>(s.hg));
  return hash_mix(h, (s.command_open ? 1u : 0u) | (s.valve_open ? 2u : 0u) | (s.consistent ? 4u : 0u));
}

SwatModel::SwatModel(SwatParams params) : params_(params) {
  if (params_.g <= 0) throw std::invalid_argument("g must be positive");
  capacity_ = quanta(params_.capacity);
  inflow_ = quanta(params_.inflow);
  outflow_ = quanta(params_.outflow);
  open_below_ = quanta(params_.open_below);
  close_at_ = quanta(params_.close_at);
  initial_ = quanta(params_.initial_level);
  quanta(params_.bias);
  quanta(params_.stealth_bias);
  if (initial_ < 0 || initial_ > capacity_) throw std::invalid_argument("initial level outside the tank");
  auto level = ObservationSpace::scaled("t", 0, capacity_, params_.decimals);
  auto pressure = ObservationSpace::scaled("p", 0, params_.g * capacity_, params_.decimals);
  observations = ObservationSpace::product("swat", {level, pressure, ObservationSpace::boolean("a")});
  inputs = ObservationSpace::labelled("input", {"tick"});
}

std::int64_t SwatModel::quanta(double units) const {
  double scaled = units * std::pow(10.0, params_.decimals);
  double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-6 * std::max(1.0, std::abs(scaled)))
    throw std::invalid_argument("value " + std::to_string(units) + " is not a multiple of the quantum");
  return static_cast<std::int64_t>(rounded);
}

System<SwatState> SwatModel::system() const {
  const std::int64_t g = params_.g;
  auto observe = [g](const SwatState& x) { return ObservationSet{{x.t, g * x.t, x.consistent ? 1 : 0}}; };
  auto observe_into = [g](const SwatState& x, ObservationSet& out) {
    out.resize(1);
    out[0].assign({x.t, g * x.t, x.consistent ? 1 : 0});
  };
  auto step = [g, cap = capacity_, in = inflow_, out = outflow_, lo = open_below_, hi = close_at_](const SwatState& x,
                                                                                                   Input) {
    SwatState y;
    y.t = std::clamp(x.t + (x.valve_open ? in : 0) - out, std::int64_t{0}, cap);
    y.lit = x.t;
    y.hg = g * x.t;
    y.command_open = x.lit < lo ? true : (x.lit >= hi ? false : x.command_open);
    y.valve_open = x.command_open;
    y.consistent = x.hg == g * x.lit;
    return y;
  };
  return System<SwatState>("swat", observations, inputs, observe, observe_into, step);
}

SwatState SwatModel::initial() const { return {initial_, initial_, params_.g * initial_, true, true, true}; }

FormulaId SwatModel::hydro() const {
  return parse_formula("G <p = " + std::to_string(params_.g) + "*t>", {observations, inputs});
}

FormulaId SwatModel::lvl() const { return parse_formula("G (<t >= 200> & <t <= 1000>)", {observations, inputs}); }

FormulaId SwatModel::hg() const { return parse_formula("G (<p >= 1000> & <p <= 9000>)", {observations, inputs}); }

FormulaId SwatModel::con() const { return parse_formula("G <a = true>", {observations, inputs}); }

std::vector<Property> SwatModel::obligations() const {
  return {{"Lvl", Polarity::Assert, conj(hydro(), lvl())}, {"Hg", Polarity::Assert, hg()}, {"Con", Polarity::Assert, con()}};
}

Implication SwatModel::implication() const {
  std::vector<FormulaId> roots{conj(hydro(), lvl()), hydro(), lvl(), hg(), con()};
  return formula_similarity(roots, 1);
}

Attack<SwatState> SwatModel::surge_up() const {
  return {"SurgeUp", {}, [cap = capacity_](const SwatState& x) {
            SwatState y = x;
            y.lit = cap;
            return y;
          }};
}

Attack<SwatState> SwatModel::bias(double b) const {
  std::int64_t q = quanta(b);
  return {"Bias", {}, [q](const SwatState& x) {
            SwatState y = x;
            y.lit += q;
            return y;
          }};
}

Attack<SwatState> SwatModel::stealthy(double b) const {
  std::int64_t q = quanta(b);
  std::int64_t g = params_.g;
  return {"Stealthy", {}, [q, g](const SwatState& x) {
            SwatState y = x;
            y.lit += q;
            y.hg += g * q;
            return y;
          }};
}

Attack<SwatState> SwatModel::attack(const std::string& kind, const std::optional<double>& b) const {
  if (kind == "surge_up") return surge_up();
  if (kind == "bias") return bias(b.value_or(params_.bias));
  if (kind == "stealthy") return stealthy(b.value_or(params_.stealth_bias));
  throw std::invalid_argument("unknown attack kind '" + kind + "'");
}

std::vector<Attacker<SwatState>> SwatModel::standard_attackers() const {
  return {{"alpha", {surge_up()}}, {"beta", {bias(params_.bias)}}, {"gamma", {stealthy(params_.stealth_bias)}}};
}

}  // namespace coalcheck

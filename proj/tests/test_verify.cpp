#include "coalcheck/closure.hpp"
#include "coalcheck/models.hpp"
#include "coalcheck/syntax.hpp"
#include "coalcheck/verify.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace coalcheck;

namespace {

template <class State>
Verdict<State> run(const System<State>& sys, const State& x0, FormulaId f) {
  KnowledgeBase<State> kb;
  return verify(sys, x0, f, kb, ClosureConfig<State>{});
}

}  // namespace

TEST_CASE("dial safety verdicts") {
  DialModel d;
  auto sys = d.system();
  auto voc = sys.vocabulary();
  for (int n = 0; n < 10; ++n) {
    auto v = run(sys, 0, parse_formula("G <. != " + std::to_string(n) + ">", voc));
    CHECK(v.outcome == Outcome::Fails);
    REQUIRE(v.witness);
    CHECK(v.witness->state == n);
  }
  auto all = run(sys, 0, parse_formula("G tt", voc));
  CHECK(all.outcome == Outcome::Holds);
  CHECK(all.stats.pairs_explored == 10);
}

TEST_CASE("refuted properties negate the verdict") {
  DialModel d;
  auto sys = d.system();
  auto voc = sys.vocabulary();
  auto skip = apply_attack(sys, d.skip());
  KnowledgeBase<int> kb;
  ClosureConfig<int> cfg;
  auto r = check_property(skip, 0, parse_property("F <. = 1>", voc), kb, cfg);
  CHECK(r.verdict.outcome == Outcome::Fails);
  CHECK(r.verdict.stats.pairs_explored == 5);
  KnowledgeBase<int> kb2;
  CHECK(check_property(sys, 0, parse_property("F <. = 7>", voc), kb2, cfg).verdict.outcome == Outcome::Holds);
  CHECK(check_property(sys, 0, parse_property("G tt", voc), kb2, cfg).verdict.outcome == Outcome::Holds);
}

TEST_CASE("puzzle reachability") {
  PuzzleModel m(20);
  auto sys = m.system();
  KnowledgeBase<PuzzleState> kb;
  ClosureConfig<PuzzleState> cfg;
  CHECK(check_property(sys, m.initial(), m.reach(17), kb, cfg).verdict.outcome == Outcome::Holds);
  std::set<std::int64_t> counters;
  for (const auto& x : oracle::reachable_states(sys, m.initial())) counters.insert(x.c);
  std::int64_t missing = 1;
  while (counters.count(missing)) ++missing;
  CAPTURE(missing);
  KnowledgeBase<PuzzleState> kb2;
  CHECK(check_property(sys, m.initial(), m.reach(missing), kb2, cfg).verdict.outcome == Outcome::Fails);
  KnowledgeBase<PuzzleState> kb3;
  CHECK(check_property(sys, m.initial(), m.reach(*counters.rbegin()), kb3, cfg).verdict.outcome == Outcome::Holds);
}

TEST_CASE("verdicts agree with breadth-first search") {
  SUBCASE("dial") {
    DialModel d;
    for (auto sys : {d.system(), apply_attack(d.system(), d.skip()), apply_attack(d.system(), d.transition_to_zero())}) {
      oracle::FormulaGenerator gen(d.observations, d.inputs, 3);
      for (int k = 0; k < 100; ++k) {
        auto f = gen.next_formula();
        for (int x : {0, 4}) {
          CAPTURE(k);
          bool expected = oracle::holds(sys, x, f);
          CHECK((run(sys, x, f).outcome == Outcome::Holds) == expected);
        }
      }
    }
  }
  SUBCASE("two-digit lock with operators") {
    LockModel lock(2);
    auto sys = lock.system();
    oracle::FormulaGenerator gen(lock.observations, lock.inputs, 5);
    ClosureConfig<LockModel::State> cfg;
    cfg.operators.push_back(lock.add_operator());
    cfg.operators.push_back(lock.shift_operator());
    KnowledgeBase<LockModel::State> kb;
    for (int k = 0; k < 150; ++k) {
      auto f = gen.next_formula();
      LockModel::State x = static_cast<LockModel::State>((k * 37) % 100);
      CAPTURE(k);
      bool expected = oracle::holds(sys, x, f);
      auto v = verify(sys, x, f, kb, cfg);
      REQUIRE(v.outcome != Outcome::Unknown);
      CHECK(!is_violation(v.outcome) == expected);
    }
  }
}

TEST_CASE("knowledge stays sound across runs") {
  LockModel lock(2);
  auto sys = lock.system();
  ClosureConfig<LockModel::State> cfg;
  cfg.operators.push_back(lock.add_operator());
  KnowledgeBase<LockModel::State> kb;
  auto props = lock.reach_all();
  auto summary = check_many(sys, lock.initial(), std::span<const Property>(props), kb, cfg);
  CHECK(summary.unknown == 0);
  for (const auto& r : summary.results) CHECK_FALSE(is_violation(r.verdict.outcome));
  kb.for_each_satisfied([&](const Pair<LockModel::State>& p) { CHECK(oracle::holds(sys, p.state, p.formula)); });
  kb.for_each_failed([&](const Pair<LockModel::State>& p) { CHECK_FALSE(oracle::holds(sys, p.state, p.formula)); });
}

TEST_CASE("lock without operators infers nothing") {
  LockModel lock(2);
  auto sys = lock.system();
  KnowledgeBase<LockModel::State> kb;
  auto props = lock.reach_all();
  auto summary = check_many(sys, lock.initial(), std::span<const Property>(props), kb, ClosureConfig<LockModel::State>{});
  CHECK(summary.inferred == 0);
  CHECK(summary.results.size() == 100);
}

TEST_CASE("pair budget yields unknown") {
  DialModel d;
  auto sys = d.system();
  KnowledgeBase<int> kb;
  VerifyOptions opt;
  opt.max_pairs = 3;
  auto v = verify(sys, 0, parse_formula("G tt", sys.vocabulary()), kb, ClosureConfig<int>{}, opt);
  CHECK(v.outcome == Outcome::Unknown);
  CHECK(kb.satisfied_size() == 0);
  CHECK(kb.failed_size() == 0);
}

TEST_CASE("open formulae are rejected") {
  DialModel d;
  CHECK_THROWS_AS(run(d.system(), 0, box(Predicate::universe(), var(0))), std::invalid_argument);
}

TEST_CASE("property ordering") {
  SwatModel m;
  auto props = m.obligations();  // Lvl, Hg, Con
  auto imp = m.implication();
  std::vector<Property> shuffled{props[2], props[1], props[0]};
  auto ordered = order_properties(std::span<const Property>(shuffled), imp);
  REQUIRE(ordered.size() == 3);
  CHECK(ordered[0].name == props[0].name);
  CHECK(ordered[1].name == props[1].name);
  CHECK(ordered[2].name == props[2].name);

  DialModel d;
  auto voc = d.system().vocabulary();
  std::vector<Property> plain{d.reach(3), d.reach(1), d.reach(2)};
  auto same = order_properties(std::span<const Property>(plain), Implication{});
  for (std::size_t k = 0; k < 3; ++k) CHECK(same[k].name == plain[k].name);

  auto psi = parse_formula("G <. != 3>", voc);
  Implication with_tt;
  with_tt.add(psi, tt());
  std::vector<Property> pair{{"tt", Polarity::Assert, tt()}, {"psi", Polarity::Assert, psi}};
  auto o = order_properties(std::span<const Property>(pair), with_tt);
  CHECK(o[0].name == "psi");
  CHECK(o[1].name == "tt");
}

TEST_CASE("bounded check on behaviour prefixes") {
  DialModel d;
  auto sys = d.system();
  auto voc = sys.vocabulary();
  auto prefix = behaviour_prefix(sys, 0, 10);
  CHECK(holds_on_prefix(prefix, parse_formula("G <. in [0, 9]>", voc)));
  CHECK_FALSE(holds_on_prefix(prefix, parse_formula("G <. != 9>", voc)));
  CHECK(holds_on_prefix(behaviour_prefix(sys, 0, 8), parse_formula("G <. != 9>", voc)));
}

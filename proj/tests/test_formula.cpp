#include "coalcheck/formula.hpp"
#include "coalcheck/models.hpp"
#include "coalcheck/syntax.hpp"
#include "doctest.h"

using namespace coalcheck;

namespace {

SpacePtr digits() { return ObservationSpace::enumerated("d", 0, 9); }

FormulaId not_equal(int n) { return atom(complement(Predicate::singleton(digits(), {n}))); }

}  // namespace

TEST_CASE("hash-consing shares structurally equal formulae") {
  CHECK(not_equal(3) == not_equal(3));
  CHECK(not_equal(3) != not_equal(4));
  CHECK(always(not_equal(3)) == always(not_equal(3)));
  CHECK(atom(Predicate::universe(digits())) == tt());
}

TEST_CASE("conjunction normal form") {
  auto a = not_equal(1), b = not_equal(2), c = not_equal(3);
  CHECK(conj(a, tt()) == a);
  CHECK(conj(a, a) == a);
  CHECK(conj(a, b) == conj(b, a));
  CHECK(conj(conj(a, b), c) == conj(a, conj(c, b)));
  CHECK(conjuncts(conj(conj(a, b), c)).size() == 3);
}

TEST_CASE("nu requires guarded recursion") {
  CHECK_THROWS_AS(nu(var(0)), std::invalid_argument);
  CHECK_THROWS_AS(nu(conj(not_equal(1), var(0))), std::invalid_argument);
  CHECK_NOTHROW(nu(box(Predicate::universe(), var(0))));
  CHECK_FALSE(is_closed(box(Predicate::universe(), var(0))));
  CHECK(is_closed(always(not_equal(1))));
}

TEST_CASE("observation and transition semantics") {
  auto q = complement(Predicate::singleton(digits(), {3}));
  auto inputs = ObservationSpace::enumerated("i", 0, 1);
  CHECK(obs(box(Predicate::singleton(inputs, {0}), atom(q))).is_universe());
  CHECK(obs(atom(q)) == q);
  CHECK(obs(always(atom(q))) == q);
  CHECK(next(atom(q), 0) == tt());
  auto only0 = box(Predicate::singleton(inputs, {0}), atom(q));
  CHECK(next(only0, 1) == tt());
  CHECK(next(only0, 0) == atom(q));
  CHECK(next(always(atom(q)), 0) == always(atom(q)));
  CHECK(next(tt(), 0) == tt());
}

TEST_CASE("size counts reachable formulae") {
  auto q = complement(Predicate::singleton(digits(), {3}));
  CHECK(size(tt(), 1) == 1);
  CHECK(size(atom(q), 1) == 2);
  CHECK(size(always(atom(q)), 1) == 1);
}

TEST_CASE("formula similarity") {
  SwatModel m;
  auto lvl = conj(m.hydro(), m.lvl());
  std::vector<FormulaId> roots{lvl, m.hg(), m.con()};
  auto sim = formula_similarity(roots, 1);
  for (auto f : roots) {
    CHECK(sim.implies(f, f));
    CHECK(sim.implies(f, tt()));
  }
  CHECK(sim.implies(lvl, m.hg()));
  CHECK_FALSE(sim.implies(m.hg(), lvl));
  CHECK_FALSE(sim.implies(m.lvl(), m.hg()));
  CHECK_FALSE(sim.implies(m.con(), m.hg()));
}

TEST_CASE("implication relation bookkeeping") {
  Implication imp;
  imp.add(not_equal(1), tt());
  imp.add(not_equal(1), tt());
  CHECK(imp.size() == 1);
  CHECK(imp.implies(not_equal(1), tt()));
  CHECK(imp.implies(not_equal(2), not_equal(2)));
  CHECK(imp.implicants(tt()).size() == 1);
}

TEST_CASE("formula text round trip") {
  DialModel d;
  auto voc = d.system().vocabulary();
  for (const char* text : {"G <. != 3>", "<. in {1, 2}>", "[tick] <. = 4>", "G (<. >= 2> & <. <= 7>)",
                           "nu v. (<. != 1> & [*] [*] v)", "tt"}) {
    CAPTURE(text);
    auto f = parse_formula(text, voc);
    CHECK(parse_formula(format_formula(f, voc), voc) == f);
  }
  CHECK(parse_formula("G <tt>", voc) == parse_formula("G tt", voc));
  CHECK(parse_formula("<. < 3>", voc) == parse_formula("<. in [0, 2]>", voc));
}

TEST_CASE("property text") {
  DialModel d;
  auto voc = d.system().vocabulary();
  auto p = parse_property("F <. = 7>", voc);
  CHECK(p.polarity == Polarity::Refute);
  CHECK(p.body == parse_formula("G <. != 7>", voc));
  CHECK(format_property(p, voc) == "F <. = 7>");
  CHECK(parse_property("!G <. != 7>", voc).body == p.body);
  CHECK(parse_property("G <. != 7>", voc).polarity == Polarity::Assert);
}

TEST_CASE("parse errors carry positions") {
  DialModel d;
  auto voc = d.system().vocabulary();
  CHECK_THROWS_AS(parse_formula("G <. = 12>", voc), ParseError);
  CHECK_THROWS_AS(parse_formula("G <. = 1", voc), ParseError);
  CHECK_THROWS_AS(parse_formula("[nope] tt", voc), ParseError);
  CHECK_THROWS_AS(parse_formula("nu v. v", voc), std::invalid_argument);
  try {
    parse_formula("G <. ? 1>", voc);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() > 0);
  }
}

TEST_CASE("product formula text") {
  SwatModel m;
  auto voc = m.system().vocabulary();
  auto f = parse_formula("G (<t >= 200> & <t <= 1000>)", voc);
  CHECK(f == m.lvl());
  auto g = parse_formula("G <(. >= 200, _, _)>", voc);
  CHECK(obs(g) == obs(parse_formula("G <t >= 200>", voc)));
  CHECK(parse_formula(format_formula(m.hydro(), voc), voc) == m.hydro());
  CHECK(parse_formula(format_formula(m.con(), voc), voc) == m.con());
}

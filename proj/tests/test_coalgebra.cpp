#include <memory>

#include "coalcheck/attacker.hpp"
#include "coalcheck/coalgebra.hpp"
#include "coalcheck/models.hpp"
#include "doctest.h"

using namespace coalcheck;

TEST_CASE("iterate folds the transition map") {
  DialModel d;
  auto sys = d.system();
  CHECK(iterate(sys, 0, std::vector<Input>{}) == 0);
  CHECK(iterate(sys, 9, std::vector<Input>{0}) == 0);
  CHECK(iterate(sys, 0, std::vector<Input>{0, 0, 0}) == 3);
  CHECK_THROWS_AS(iterate(sys, 0, std::vector<Input>{1}), std::out_of_range);
}

TEST_CASE("behaviour prefix") {
  DialModel d;
  auto sys = d.system();
  auto p0 = behaviour_prefix(sys, 0, 0);
  CHECK(p0.node_count() == 1);
  CHECK(p0.at(std::vector<Input>{}) == ObservationSet{{0}});
  auto p3 = behaviour_prefix(sys, 0, 3);
  CHECK(p3.at(std::vector<Input>{0, 0}) == ObservationSet{{2}});
  auto zero = apply_attack(sys, d.observe_zero());
  auto pz = behaviour_prefix(zero, 0, 4);
  for (std::size_t k = 0; k < pz.node_count(); ++k) CHECK(pz.at_node(k) == ObservationSet{{0}});
}

TEST_CASE("behaviour prefix on a branching system") {
  LockModel lock(2);
  auto sys = lock.system();
  auto p = behaviour_prefix(sys, LockModel::State{0}, 3);
  CHECK(p.node_count() == 1 + 2 + 4 + 8);
  CHECK(p.at(std::vector<Input>{0, 1, 1}) == ObservationSet{{12}});
  CHECK(p.at(std::vector<Input>{1, 1, 1}) == ObservationSet{{3}});
  CHECK(p == behaviour_prefix(sys, LockModel::State{0}, 3));
  CHECK_FALSE(p == behaviour_prefix(sys, LockModel::State{1}, 3));
}

TEST_CASE("prefix system replays the truncated behaviour") {
  LockModel lock(2);
  auto sys = lock.system();
  auto prefix = std::make_shared<const BehaviourPrefix>(behaviour_prefix(sys, LockModel::State{7}, 2));
  auto replay = prefix_system(prefix, sys.observation_space(), sys.input_space());
  std::vector<Input> word{1, 0};
  CHECK(replay.observe(iterate(replay, std::uint64_t{0}, std::span<const Input>(word))) ==
        sys.observe(iterate(sys, LockModel::State{7}, std::span<const Input>(word))));
  std::vector<Input> longer{1, 0, 1, 1};
  CHECK(replay.observe(iterate(replay, std::uint64_t{0}, std::span<const Input>(longer))) ==
        sys.observe(iterate(sys, LockModel::State{7}, std::span<const Input>(word))));
}

TEST_CASE("nondeterministic adapter") {
  auto obs_space = ObservationSpace::enumerated("n", 0, 9);
  auto in_space = ObservationSpace::enumerated("i", 0, 1);
  NondetSystem<int> nd{"nd", obs_space, in_space, [](const int& x) { return ObservationSet{{x}}; },
                       [](const int& x, Input i) {
                         if (i == 0) return std::vector<int>{(x + 1) % 10};
                         return std::vector<int>{(x + 2) % 10, (x + 5) % 10};
                       }};
  auto det = adapt_nondeterministic(nd);
  DialModel dial;
  auto dsys = dial.system();
  SUBCASE("singletons behave like the underlying state") {
    for (int x = 0; x < 10; ++x) {
      CHECK(det.observe({x}) == nd.observe(x));
      CHECK(det.step({x}, 0) == std::vector<int>{(x + 1) % 10});
    }
  }
  SUBCASE("union laws") {
    std::vector<int> ab{1, 4};
    CHECK(det.observe(ab) == ObservationSet{{1}, {4}});
    CHECK(det.step(ab, 1) == std::vector<int>{3, 6, 9});
  }
  SUBCASE("sets are canonical") { CHECK(det.step({3, 0}, 1) == std::vector<int>{2, 5, 8}); }
}

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ism/game.hpp"

using namespace ism;

TEST_SUITE("game") {

TEST_CASE("rps has the expected shape and tables") {
  const GameInstance g = build_rps();
  CHECK(g.arena.num_states() == 1);
  CHECK(g.arena.num_p1_actions() == 3);
  CHECK(g.arena.num_p2_actions() == 3);
  CHECK(g.num_policies() == 4);
  CHECK(validate(g).ok());
  CHECK(validate(g).warnings.empty());
  // rock beats scissors
  CHECK(g.arena.reward(0, 0, 2) == 1.0);
  CHECK(g.arena.reward(0, 0, 1) == -1.0);
  CHECK(g.arena.reward(0, 0, 0) == 0.0);
  for (Index i = 0; i < 4; ++i) {
    double s = 0.0;
    for (double x : g.switching.row(i)) s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(g.switching(0, 0) == 0.55);
  CHECK(g.switching(2, 2) == 0.64);
  CHECK(g.switching(2, 0) == 0.12);
  CHECK(g.switching(1, 3) == 0.15);
}

TEST_CASE("rps opponent actions are all observable") {
  const auto obs = nonzero_observations(build_rps());
  REQUIRE(obs.size() == 3);
  for (Index a = 0; a < 3; ++a) CHECK(obs[a] == Observation{0, a});
}

TEST_CASE("rps-mem shape, memory transitions and a reactive policy") {
  const GameInstance g = build_rps_mem();
  CHECK(g.arena.num_states() == 9);
  CHECK(g.num_policies() == 9);
  CHECK(validate(g).ok());
  CHECK(nonzero_observations(g).size() == 27);
  // previous move (p1, s2) from any state
  for (Index s = 0; s < 9; ++s) CHECK(g.arena.transition(s, 1, 2, 1 * 3 + 2) == 1.0);
  // pi4 repeats what player 1 just played: after (r1, *) it favours r2
  const auto& pi4 = g.policies[3];
  for (Index b = 0; b < 3; ++b) {
    CHECK(pi4.prob(0 * 3 + b, 0) == doctest::Approx(0.8));
    CHECK(pi4.prob(0 * 3 + b, 1) == doctest::Approx(0.1));
    CHECK(pi4.prob(0 * 3 + b, 2) == doctest::Approx(0.1));
  }
  // pi5 plays what would have beaten player 1: paper beats rock
  CHECK(g.policies[4].prob(0, 1) == doctest::Approx(0.8));
  for (const auto& p : g.policies)
    for (double x : p.choice) CHECK(x >= 0.1 - 1e-12);
}

TEST_CASE("anticipate-avoid shape, ring distance and rewards") {
  const GameInstance g = build_anticipate_avoid(25);
  CHECK(g.arena.num_states() == 625);
  CHECK(g.arena.num_p1_actions() == 2);
  CHECK(g.arena.num_p2_actions() == 2);
  CHECK(g.num_policies() == 4);
  CHECK(validate(g).ok());
  CHECK(ring_distance(1, 25, 25) == 1);
  CHECK(ring_distance(3, 3, 25) == 0);
  CHECK(ring_distance(1, 13, 25) == 12);
  CHECK(ring_distance(1, 14, 25) == 12);
  for (int i = 0; i < 25; ++i) {
    const Index s = static_cast<Index>(i * 25 + i);
    for (Index a1 = 0; a1 < 2; ++a1)
      for (Index a2 = 0; a2 < 2; ++a2) CHECK(g.arena.reward(s, a1, a2) == -10.0);
  }
  CHECK_THROWS_AS(build_anticipate_avoid(9), std::domain_error);
}

TEST_CASE("anticipate-avoid joint kernel is the product of the two moves") {
  const GameInstance g = build_anticipate_avoid(10);
  // state (1, 1), both move left with prob 0.8 each
  const Index s = 0;
  const auto row = g.arena.next(s, 0, 0);
  double total = 0.0;
  for (double x : row) total += x;
  CHECK(total == doctest::Approx(1.0));
  CHECK(row[0] == doctest::Approx(0.04));
  CHECK(row[9 * 10 + 9] == doctest::Approx(0.64));
  CHECK(row[0 * 10 + 9] == doctest::Approx(0.16));
}

TEST_CASE("build_switch entries and domain") {
  const SwitchModel t = build_switch(4, 0.5);
  CHECK(t(0, 0) == 0.5);
  CHECK(t(0, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(t.min_entry() == doctest::Approx(1.0 / 6.0));
  CHECK(build_switch(4, 0.8).min_entry() == doctest::Approx(0.2 / 3.0));
  for (double stay : {0.1, 0.3, 0.5, 0.9}) {
    const SwitchModel m = build_switch(5, stay);
    CHECK(m.min_entry() == doctest::Approx(std::min(stay, (1.0 - stay) / 4.0)));
    for (Index i = 0; i < 5; ++i) {
      double s = 0.0;
      for (double x : m.row(i)) s += x;
      CHECK(s == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(build_switch(1, 0.5), std::domain_error);
  CHECK_THROWS_AS(build_switch(4, 1.0), std::domain_error);
  CHECK_THROWS_AS(build_switch(4, 0.0), std::domain_error);
}

TEST_CASE("validate reports a short transition row") {
  GameInstance g = build_rps();
  g.arena.next_mut(0, 0, 0)[0] = 0.9;
  const auto rep = validate(g);
  CHECK(rep.violations.size() == 1);
}

TEST_CASE("validate warns on a zero switch entry") {
  GameInstance g = build_rps().with_switch(SwitchModel(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}));
  const auto rep = validate(g);
  CHECK(rep.ok());
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("positivity") != std::string::npos);
}

TEST_CASE("validate catches policy and switch defects") {
  GameInstance g = build_rps();
  g.policies[0].choice[0] = 0.7;
  CHECK_FALSE(validate(g).ok());
  g = build_rps();
  g.switching = build_switch(3, 0.5);
  CHECK_FALSE(validate(g).ok());
  g = build_rps();
  g.policies.clear();
  CHECK_FALSE(validate(g).ok());
}

TEST_CASE("single deterministic policy gives one observation per state") {
  GameInstance g = build_rps_mem();
  OpponentPolicy p{"det", 3, std::vector<double>(27, 0.0)};
  for (Index s = 0; s < 9; ++s) p.choice[s * 3 + s % 3] = 1.0;
  g.policies = {p};
  g.switching = SwitchModel(1, {1.0});
  CHECK(nonzero_observations(g).size() == 9);
}

TEST_CASE("nonzero_observations is ordered and stable") {
  Rng rng(7);
  const GameInstance g = testutil::random_stateless_game(3, 4, rng);
  const auto a = nonzero_observations(g);
  const auto b = nonzero_observations(g);
  CHECK(a == b);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1] < a[i]);
}

}  // TEST_SUITE

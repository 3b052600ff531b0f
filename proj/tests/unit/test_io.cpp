#include <doctest.h>

#include <variant>

#include "ism/io.hpp"
#include "ism/synthesis.hpp"

using namespace ism;

namespace {

const char* kTinyGame = R"({
  "states": ["a", "b"],
  "p1_actions": ["go", "stay"],
  "p2_actions": ["x", "y"],
  "initial_state": "b",
  "transitions": [
    {"s": "a", "a1": "go", "a2": "x", "next": {"b": 1.0}},
    {"s": "a", "a1": "go", "a2": "y", "next": {"a": 0.5, "b": 0.5000000000001}}
  ],
  "rewards": [{"s": "a", "a1": "go", "a2": "x", "r": 2.5}],
  "policies": [
    {"name": "px", "choice": {"*": {"x": 1.0}}},
    {"name": "mix", "choice": {"a": {"x": 0.5, "y": 0.5}, "b": {"y": 1}}}
  ],
  "switch": [[0.9, 0.1], [0.2, 0.8]]
})";

}  // namespace

TEST_SUITE("io") {

TEST_CASE("game file with defaults and names") {
  const GameInstance g = parse_game(kTinyGame);
  CHECK(g.arena.num_states() == 2);
  CHECK(g.arena.initial_state() == 1);
  CHECK(g.arena.transition(0, 0, 0, 1) == 1.0);
  CHECK(g.arena.transition(1, 1, 1, 1) == 1.0);  // omitted triple is a self loop
  CHECK(g.arena.transition(0, 0, 1, 0) + g.arena.transition(0, 0, 1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.arena.reward(0, 0, 0) == 2.5);
  CHECK(g.arena.reward(1, 0, 0) == 0.0);
  CHECK(g.policies[0].prob(1, 0) == 1.0);
  CHECK(g.policies[1].prob(1, 1) == 1.0);
  CHECK(g.switching(1, 0) == 0.2);
  CHECK(validate(g).ok());
}

TEST_CASE("game round trip") {
  const GameInstance a = build_rps_mem();
  const GameInstance b = parse_game(dump_game(a));
  CHECK(dump_game(b) == dump_game(a));
  CHECK(b.switching.data() == a.switching.data());
  CHECK(b.policies[4].choice == a.policies[4].choice);
}

TEST_CASE("probabilities off by more than the tolerance are rejected") {
  std::string bad = kTinyGame;
  bad.replace(bad.find("[0.9, 0.1]"), 10, "[0.9, 0.0]");
  CHECK_THROWS_AS(parse_game(bad), ParseError);
  const GameInstance lenient = parse_game(bad, false);
  CHECK_FALSE(validate(lenient).ok());
}

TEST_CASE("malformed json reports a position") {
  try {
    parse_game("{\n  \"states\": [\"a\",\n  }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line >= 2);
    CHECK(e.column >= 1);
  }
  CHECK_THROWS_AS(parse_game(R"({"states": ["a"], "p1_actions": ["u"], "p2_actions": ["v"],
    "policies": [{"choice": {"a": {"w": 1}}}], "switch": [[1]]})"), ParseError);
}

TEST_CASE("machine round trip keeps every bit") {
  const GameInstance g = build_rps();
  SynthesisOptions o;
  o.lambda = 0.25;
  const auto out = synthesize(g, o);
  REQUIRE(std::holds_alternative<SynthesisSuccess>(out));
  const Ism& m = std::get<SynthesisSuccess>(out).machine;
  const Ism back = deserialize(serialize(m));
  CHECK(back == m);
  CHECK(serialize(back) == serialize(m));
  const std::string dot = export_dot(m, &g);
  std::size_t nodes = 0, edges = 0;
  for (std::size_t p = dot.find("label=\""); p != std::string::npos; p = dot.find("label=\"", p + 1)) {
    if (dot.compare(p + 7, 1, "(") == 0) ++edges;
    else ++nodes;
  }
  CHECK(nodes == m.num_states());
  CHECK(edges == m.num_edges());
  CHECK(edges <= m.num_states() * m.alphabet().size());
}

TEST_CASE("single-state machine exports one node") {
  Ism m(nonzero_observations(build_rps()));
  m.add_state(uniform_belief(4));
  const std::string dot = export_dot(m);
  CHECK(dot.find("m0 [") != std::string::npos);
  CHECK(dot.find("->") == std::string::npos);
  CHECK(deserialize(serialize(m)) == m);
}

TEST_CASE("bad machine files") {
  CHECK_THROWS_AS(deserialize("{\"states\": 3}"), ParseError);
  CHECK_THROWS_AS(deserialize("not json"), ParseError);
}

TEST_CASE("inline edge query") {
  const EdgeQuery q = parse_query(R"({
    "source": [0.25, 0.17, 0.32, 0.26], "target": [0.31, 0.17, 0.26, 0.26],
    "alphas": [0.5, 0, 0.5, 0.3333333333333333], "lambda": 0.25, "observation": [0, 0],
    "switch": [[0.55,0.15,0.15,0.15],[0.15,0.55,0.15,0.15],[0.12,0.12,0.64,0.12],[0.12,0.12,0.12,0.64]]})");
  CHECK(q.lambda == 0.25);
  CHECK(q.switching(2, 2) == 0.64);
  CHECK_FALSE(check_edge(q).consistent());
}

TEST_CASE("observation scripts") {
  const GameInstance rps = build_rps();
  const auto s = parse_script("# comment\nr2\n\np2\nt s2\n", rps);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == Observation{0, 0});
  CHECK(s[2] == Observation{0, 2});
  CHECK_THROWS_AS(parse_script("q2\n", rps), ParseError);
  CHECK_THROWS_AS(parse_script("r2\n", build_rps_mem()), ParseError);
  const auto m = parse_script("(p1,s2) r2\n", build_rps_mem());
  CHECK(m[0] == Observation{1 * 3 + 2, 0});
}

TEST_CASE("policy file round trip") {
  const GameInstance g = build_rps().with_switch(build_switch(4, 0.5));
  SynthesisOptions o;
  o.lambda = 0.1;
  const auto out = synthesize(g, o);
  REQUIRE(std::holds_alternative<SynthesisSuccess>(out));
  const Ism& m = std::get<SynthesisSuccess>(out).machine;
  const PlannerPolicy p = plan(g, m);
  const std::string text = serialize_policy(p, g, 0.95);
  const PlannerPolicy q = deserialize_policy(text, compose(g, m), g);
  CHECK(q.plan.policy == p.plan.policy);
  CHECK(serialize_policy(q, g, 0.95) == text);
}

}  // TEST_SUITE

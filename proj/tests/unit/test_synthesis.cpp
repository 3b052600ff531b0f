#include <doctest.h>

#include <algorithm>
#include <variant>

#include "helpers.hpp"
#include "ism/bounds.hpp"
#include "ism/synthesis.hpp"
#include "ism/verify.hpp"

using namespace ism;

namespace {

SynthesisSuccess expect_machine(SynthesisOutcome out) {
  REQUIRE(std::holds_alternative<SynthesisSuccess>(out));
  return std::get<SynthesisSuccess>(std::move(out));
}

// The hand-drawn eight-state RPS machine. Letters: 0 = r2, 1 = p2, 2 = s2.
Ism hand_drawn_machine() {
  Ism m(nonzero_observations(build_rps()));
  const std::vector<std::vector<double>> beliefs{
      {0.25, 0.25, 0.25, 0.25}, {0.29, 0.17, 0.29, 0.25}, {0.29, 0.29, 0.17, 0.25},
      {0.17, 0.29, 0.29, 0.25}, {0.25, 0.17, 0.32, 0.26}, {0.26, 0.32, 0.17, 0.25},
      {0.31, 0.17, 0.26, 0.26}, {0.33, 0.25, 0.17, 0.25}};
  for (const auto& b : beliefs) m.add_state(Belief(b));
  const Index r[8] = {1, 6, 6, 4, 6, 6, 6, 6};
  const Index p[8] = {3, 3, 3, 3, 3, 3, 3, 3};
  const Index s[8] = {2, 7, 5, 5, 7, 5, 7, 7};
  for (Index k = 0; k < 8; ++k) {
    m.set_edge(k, Index{0}, r[k]);
    m.set_edge(k, Index{1}, p[k]);
    m.set_edge(k, Index{2}, s[k]);
  }
  return m;
}

}  // namespace

TEST_SUITE("synthesis") {

TEST_CASE("empty and single-step runs") {
  const GameInstance g = build_rps();
  SynthesisOptions o;
  o.lambda = 0.25;
  const auto& ok = expect_machine(synthesize(g, o));
  const Ism& m = ok.machine;
  CHECK(run(m, {}).state == m.initial());
  CHECK(m.belief(0) == uniform_belief(4));
  for (const auto& obs : nonzero_observations(g)) {
    const std::vector<Observation> one{obs};
    CHECK(run(m, one).state == advance(m, 0, obs));
    const auto d = advance(m, 0, obs);
    REQUIRE(d);
    CHECK(tv_distance(m.belief(*d), transform(uniform_belief(4), obs, g)) <= 0.25 + 1e-12);
  }
  CHECK_THROWS_AS(advance(m, m.num_states(), Observation{0, 0}), std::out_of_range);
}

TEST_CASE("run equals chained advance") {
  const GameInstance g = build_rps();
  SynthesisOptions o;
  o.lambda = 0.25;
  const auto& ok = expect_machine(synthesize(g, o));
  Rng rng(2);
  std::vector<Observation> seq;
  for (int k = 0; k < 30; ++k) seq.push_back({0, static_cast<Index>(rng() % 3)});
  Index m = 0;
  for (const auto& obs : seq) m = *advance(ok.machine, m, obs);
  CHECK(run(ok.machine, seq).state == m);
}

TEST_CASE("observation outside the alphabet is undefined") {
  GameInstance g = build_rps();
  for (auto& p : g.policies) {
    p.choice = {0.5, 0.5, 0.0};
  }
  g.switching = build_switch(4, 0.5);
  SynthesisOptions o;
  o.lambda = 0.2;
  const auto& ok = expect_machine(synthesize(g, o));
  CHECK(ok.machine.alphabet().size() == 2);
  CHECK_FALSE(advance(ok.machine, 0, Observation{0, 2}));
  const std::vector<Observation> seq{{0, 0}, {0, 2}, {0, 1}};
  const RunResult r = run(ok.machine, seq);
  CHECK_FALSE(r.state);
  CHECK(r.failed_at == 1);
}

TEST_CASE("reference matrix machine is consistent and separated") {
  const GameInstance g = build_rps();
  SynthesisOptions o;
  o.lambda = 0.25;
  const auto& ok = expect_machine(synthesize(g, o));
  const Ism& m = ok.machine;
  CHECK(ok.stats.states == m.num_states());
  CHECK(ok.stats.edges == m.num_edges());
  CHECK(m.num_edges() == m.num_states() * 3);
  VerifyOptions vo;
  vo.lambda = 0.25;
  vo.num_sequences = 2000;
  const VerifyReport rep = verify_consistency(m, g, vo);
  CHECK(rep.ok());
  CHECK(rep.edges_checked == m.num_edges());
  CHECK(rep.max_observed_gap <= 0.25 + 1e-6);
  double min_gap = 1e9;
  for (Index a = 0; a < m.num_states(); ++a)
    for (Index b = a + 1; b < m.num_states(); ++b)
      min_gap = std::min(min_gap, tv_distance(m.belief(a), m.belief(b)));
  CHECK(min_gap > 0.0);
}

TEST_CASE("synthesis is deterministic and serial equals parallel") {
  const GameInstance g = build_rps().with_switch(build_switch(4, 0.6));
  SynthesisOptions o;
  o.lambda = 0.1;
  const auto a = expect_machine(synthesize(g, o)).machine;
  const auto b = expect_machine(synthesize(g, o)).machine;
  o.exec = Exec::serial;
  const auto c = expect_machine(synthesize(g, o)).machine;
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("sticky opponent fails at a genuinely inconsistent fresh edge") {
  const GameInstance g = build_rps().with_switch(build_switch(4, 0.8));
  SynthesisOptions o;
  o.lambda = 0.1;
  const auto out = synthesize(g, o);
  REQUIRE(std::holds_alternative<SynthesisFailure>(out));
  const auto& f = std::get<SynthesisFailure>(out);
  CHECK(f.attempted_target == transform(f.source_belief, f.observation, g));
  const auto q = make_query(g, f.source_belief, f.attempted_target, f.observation, 0.1);
  const Verdict v = check_edge(q);
  REQUIRE_FALSE(v.consistent());
  const auto post = post_distance(q, f.witness.witness);
  REQUIRE(post);
  CHECK(*post > 0.1);
}

TEST_CASE("budget is reported") {
  const GameInstance g = build_rps().with_switch(build_switch(4, 0.6));
  SynthesisOptions o;
  o.lambda = 0.1;
  o.max_states = 5;
  const auto out = synthesize(g, o);
  REQUIRE(std::holds_alternative<BudgetExceeded>(out));
  CHECK(std::get<BudgetExceeded>(out).stats.states <= 6);
}

TEST_CASE("zero-probability observations are skipped with a warning") {
  GameInstance g = build_rps();
  g.policies = {{"rock", 3, {1.0, 0.0, 0.0}}, {"paper", 3, {0.0, 1.0, 0.0}}};
  g.switching = SwitchModel(2, {1, 0, 0, 1});
  SynthesisOptions o;
  o.lambda = 0.3;
  const auto& ok = expect_machine(synthesize(g, o));
  CHECK(ok.machine.num_states() == 3);
  CHECK_FALSE(ok.stats.warnings.empty());
}

TEST_CASE("hand-drawn machine has the inconsistent 4 -r2-> 6 edge") {
  const GameInstance g = build_rps();
  const Ism m = hand_drawn_machine();
  VerifyOptions vo;
  vo.lambda = 0.25;
  vo.num_sequences = 200;
  const VerifyReport rep = verify_consistency(m, g, vo);
  CHECK_FALSE(rep.ok());
  const bool found = std::any_of(rep.inconsistent_edges.begin(), rep.inconsistent_edges.end(),
                                 [](const EdgeDefect& d) {
                                   return d.source == 4 && d.target == 6 && d.observation == Observation{0, 0};
                                 });
  CHECK(found);
}

TEST_CASE("fully mixing single-state machine has no violations") {
  GameInstance g = build_rps();
  g.switching = SwitchModel(4, std::vector<double>(16, 0.25));
  Ism m(nonzero_observations(g));
  m.add_state(uniform_belief(4));
  for (Index l = 0; l < 3; ++l) m.set_edge(0, l, 0);
  VerifyOptions vo;
  vo.lambda = 0.01;
  vo.num_sequences = 500;
  const VerifyReport rep = verify_consistency(m, g, vo);
  CHECK(rep.ok());
  CHECK(rep.max_observed_gap < 1e-12);
}

TEST_CASE("premise of the termination guarantee rules out failure") {
  Rng rng(17);
  int tried = 0;
  for (int k = 0; k < 6; ++k) {
    GameInstance g = testutil::random_stateless_game(3, 3, rng);
    g.switching = build_switch(3, 0.36 + 0.01 * k);
    REQUIRE(termination_guarantee(g).guaranteed);
    for (double lambda : {0.05, 0.1, 0.25}) {
      SynthesisOptions o;
      o.lambda = lambda;
      o.max_seconds = 20;
      const auto out = synthesize(g, o);
      CHECK_FALSE(std::holds_alternative<SynthesisFailure>(out));
      ++tried;
    }
  }
  CHECK(tried == 18);
}

TEST_CASE("lifo order and floor option still give consistent machines") {
  const GameInstance g = build_rps();
  SynthesisOptions o;
  o.lambda = 0.25;
  o.order = WorklistOrder::lifo;
  const auto& lifo = expect_machine(synthesize(g, o));
  VerifyOptions vo;
  vo.lambda = 0.25;
  vo.num_sequences = 500;
  CHECK(verify_consistency(lifo.machine, g, vo).ok());
  o.order = WorklistOrder::fifo;
  o.floor_at_min_entry = true;
  const auto& fl = expect_machine(synthesize(g, o));
  vo.check_edges = false;
  const auto rep = verify_consistency(fl.machine, g, vo);
  CHECK(rep.violations == 0);
}

}  // TEST_SUITE

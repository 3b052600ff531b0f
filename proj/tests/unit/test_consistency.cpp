#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../oracles/oracles.hpp"
#include "helpers.hpp"
#include "ism/consistency.hpp"

using namespace ism;

namespace {

EdgeQuery example3() {
  const GameInstance g = build_rps();
  return make_query(g, Belief({0.25, 0.17, 0.32, 0.26}), Belief({0.31, 0.17, 0.26, 0.26}),
                    Observation{0, 0}, 0.25);
}

// Query with random beliefs near an honest tau step so both verdicts occur.
EdgeQuery random_query(std::size_t n, Rng& rng) {
  const GameInstance g = testutil::random_stateless_game(n, 3, rng);
  const Observation o{0, static_cast<Index>(rng() % 3)};
  const Belief src(sample_simplex(n, rng));
  std::uniform_real_distribution<double> lam(0.05, 0.4), mix(0.0, 0.3);
  auto tgt = transform(src, o, g).vec();
  const auto noise = sample_simplex(n, rng);
  const double m = mix(rng);
  for (std::size_t i = 0; i < n; ++i) tgt[i] = (1 - m) * tgt[i] + m * noise[i];
  return make_query(g, src, Belief(tgt), o, lam(rng));
}

// sum_j |e_j(b)| - lambda sum_i alpha_i b_i
double slack(const EdgeQuery& q, std::span<const double> b) {
  const std::size_t n = b.size();
  double z = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) z += q.alphas[i] * b[i];
  for (std::size_t j = 0; j < n; ++j) {
    double e = -q.target[j] * z;
    for (std::size_t i = 0; i < n; ++i) e += q.switching(i, j) * q.alphas[i] * b[i];
    total += std::abs(e);
  }
  return total - q.lambda * z;
}

void check_witness(const EdgeQuery& q, const Refutation& r) {
  CHECK(tv_distance(r.witness, q.source) <= q.lambda + 1e-9);
  CHECK(observation_probability(r.witness, q.alphas) > 1e-12);
  const auto post = post_distance(q, r.witness);
  REQUIRE(post);
  CHECK(*post > q.lambda - 1e-9);
  CHECK(r.pre_distance == doctest::Approx(tv_distance(r.witness, q.source)));
  CHECK(r.post_distance == doctest::Approx(*post));
}

}  // namespace

TEST_SUITE("consistency") {

TEST_CASE("single policy is always consistent") {
  GameInstance g = build_rps();
  g.policies.resize(1);
  g.switching = SwitchModel(1, {1.0});
  const auto q = make_query(g, Belief({1.0}), Belief({1.0}), Observation{0, 0}, 0.1);
  CHECK(check_edge(q).consistent());
  CHECK_FALSE(brute_force_refute(q, 1000, 1));
}

TEST_CASE("example query is refuted with a valid witness") {
  const auto q = example3();
  const Verdict v = check_edge(q);
  REQUIRE_FALSE(v.consistent());
  check_witness(q, *v.refutation);
}

TEST_CASE("the published witness violates the edge") {
  const auto q = example3();
  const Belief w({0.125, 0.17, 0.445, 0.26});
  CHECK(tv_distance(w, q.source) == doctest::Approx(0.25));
  const auto post = post_distance(q, w);
  REQUIRE(post);
  CHECK(*post > 0.25);
  CHECK(*post == doctest::Approx(0.3527).epsilon(1e-3));
}

TEST_CASE("brute force finds the example refutation") {
  const auto q = example3();
  const auto w = brute_force_refute(q, 100000, 42);
  REQUIRE(w);
  const auto post = post_distance(q, *w);
  REQUIRE(post);
  CHECK(*post > q.lambda);
  CHECK(tv_distance(*w, q.source) <= q.lambda + 1e-9);
}

TEST_CASE("self edge of a fixed point is consistent") {
  // total mixing: every update lands on uniform
  GameInstance g = build_rps();
  g.switching = SwitchModel(4, std::vector<double>(16, 0.25));
  const Belief u = uniform_belief(4);
  for (Index a = 0; a < 3; ++a) CHECK(check_edge(make_query(g, u, u, {0, a}, 0.1)).consistent());
}

TEST_CASE("serial and parallel agree on verdict and witness") {
  Rng rng(21);
  for (int k = 0; k < 60; ++k) {
    const auto q = random_query(2 + k % 4, rng);
    const Verdict a = check_edge(q, Exec::serial);
    const Verdict b = check_edge(q, Exec::parallel);
    CHECK(a.consistent() == b.consistent());
    if (!a.consistent() && !b.consistent()) CHECK(a.refutation->witness == b.refutation->witness);
  }
}

TEST_CASE("two-policy verdicts match a 1e-3 grid") {
  Rng rng(4);
  int compared = 0, refuted = 0;
  for (int k = 0; k < 150; ++k) {
    const auto q = random_query(2, rng);
    const auto grid = oracle::grid_search(q.source.vec(), q.target.vec(), q.alphas,
                                          q.switching.data(), q.lambda, 1e-3);
    if (std::abs(grid.max_post - q.lambda) <= 1e-2) continue;
    ++compared;
    const bool grid_refutes = grid.max_post > q.lambda;
    const Verdict v = check_edge(q);
    CHECK(v.consistent() != grid_refutes);
    if (!v.consistent()) {
      ++refuted;
      check_witness(q, *v.refutation);
    }
  }
  CHECK(compared > 50);
  CHECK(refuted > 0);
  CHECK(refuted < compared);
}

TEST_CASE("vertex maximum decides the verdict") {
  Rng rng(8);
  for (int k = 0; k < 80; ++k) {
    const std::size_t n = 2 + k % 3;
    const auto q = random_query(n, rng);
    const auto verts = feasible_vertices(q.source, q.lambda);
    REQUIRE_FALSE(verts.empty());
    double best = -1e300;
    for (const auto& v : verts) {
      CHECK(tv_distance(v, q.source) <= q.lambda + 1e-9);
      best = std::max(best, slack(q, v.values()));
    }
    // convex objective: no sampled interior point beats the vertices
    for (int s = 0; s < 200; ++s) {
      auto w = sample_simplex(verts.size(), rng);
      std::vector<double> b(n, 0.0);
      for (std::size_t m = 0; m < verts.size(); ++m)
        for (std::size_t i = 0; i < n; ++i) b[i] += w[m] * verts[m][i];
      CHECK(slack(q, b) <= best + 1e-12);
    }
    if (std::abs(best) < 1e-6) continue;
    CHECK(check_edge(q).consistent() == (best <= 0.0));
  }
}

TEST_CASE("brute force never refutes a consistent edge") {
  Rng rng(13);
  int consistent = 0;
  for (int k = 0; k < 40; ++k) {
    const auto q = random_query(2 + k % 3, rng);
    if (!check_edge(q).consistent()) continue;
    ++consistent;
    for (std::uint64_t seed : {1, 2, 3}) CHECK_FALSE(brute_force_refute(q, 2000, seed));
  }
  CHECK(consistent > 0);
}

TEST_CASE("floor restricts the search region") {
  const auto q0 = example3();
  auto q = q0;
  q.floor = 0.12;
  const Verdict v = check_edge(q);
  if (!v.consistent())
    for (double x : v.refutation->witness.values()) CHECK(x >= 0.12 - 1e-9);
}

TEST_CASE("dimension mismatch and bad lambda throw") {
  auto q = example3();
  q.target = uniform_belief(3);
  CHECK_THROWS_AS(check_edge(q), std::invalid_argument);
  q = example3();
  q.lambda = 0.0;
  CHECK_THROWS_AS(check_edge(q), std::invalid_argument);
}

TEST_CASE("edge checker caches identical queries") {
  const GameInstance g = build_rps();
  EdgeChecker ec(g, 0.25);
  const Belief a({0.25, 0.17, 0.32, 0.26}), b({0.31, 0.17, 0.26, 0.26});
  const Verdict v1 = ec.check(a, b, {0, 0});
  const Verdict v2 = ec.check(a, b, {0, 0});
  CHECK(v1.consistent() == v2.consistent());
  CHECK(ec.queries() == 2);
  CHECK(ec.cache_hits() == 1);
  ec.check(a, b, {0, 1});
  CHECK(ec.cache_hits() == 1);
}

}  // TEST_SUITE

#include "ism/verify.hpp"

#include <algorithm>

#include "ism/random.hpp"

namespace ism {

namespace {

struct SequenceResult {
  double gap = 0.0;
  bool undefined = false;
};

SequenceResult sample_sequence(const Ism& ism, const GameInstance& g,
                               const std::vector<std::vector<double>>& alphas,
                               std::size_t max_len, Rng rng) {
  const auto& sigma = ism.alphabet();
  Belief b = uniform_belief(g.num_policies());
  Index m = ism.initial();
  SequenceResult r;
  std::vector<double> w(sigma.size());
  for (std::size_t t = 0; t < max_len; ++t) {
    for (std::size_t k = 0; k < sigma.size(); ++k) w[k] = observation_probability(b, alphas[k]);
    const std::size_t k = sample_index(w, rng);
    const Index next = ism.successor(m, k);
    if (next == Ism::kUndefined) {
      r.undefined = true;
      return r;
    }
    b = shift(condition(b, alphas[k], sigma[k]), g.switching);
    m = next;
    r.gap = std::max(r.gap, tv_distance(ism.belief(m), b));
  }
  return r;
}

}  // namespace

VerifyReport verify_consistency(const Ism& ism, const GameInstance& g, const VerifyOptions& opts) {
  VerifyReport rep;
  const auto& sigma = ism.alphabet();
  std::vector<std::vector<double>> alphas;
  for (const auto& o : sigma) alphas.push_back(g.alphas(o));

  if (opts.check_edges) {
    struct Edge {
      Index src, letter, dst;
    };
    std::vector<Edge> edges;
    for (Index m = 0; m < ism.num_states(); ++m)
      for (Index l = 0; l < sigma.size(); ++l)
        if (auto d = ism.successor(m, l); d != Ism::kUndefined) edges.push_back({m, l, d});
    std::vector<Verdict> verdicts(edges.size());
    const auto ne = static_cast<std::int64_t>(edges.size());
#pragma omp parallel for schedule(dynamic, 4) if (opts.exec == Exec::parallel)
    for (std::int64_t i = 0; i < ne; ++i) {
      const auto& e = edges[static_cast<std::size_t>(i)];
      auto q = make_query(g, ism.belief(e.src), ism.belief(e.dst), sigma[e.letter], opts.lambda);
      verdicts[static_cast<std::size_t>(i)] = check_edge(q, Exec::serial);
    }
    rep.edges_checked = edges.size();
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (!verdicts[i].consistent())
        rep.inconsistent_edges.push_back(
            {edges[i].src, sigma[edges[i].letter], edges[i].dst, *verdicts[i].refutation});
  }

  std::vector<SequenceResult> res(opts.num_sequences);
  const auto ns = static_cast<std::int64_t>(opts.num_sequences);
#pragma omp parallel for schedule(static) if (opts.exec == Exec::parallel)
  for (std::int64_t k = 0; k < ns; ++k)
    res[static_cast<std::size_t>(k)] =
        sample_sequence(ism, g, alphas, opts.max_len, make_stream(opts.seed, static_cast<std::uint64_t>(k)));
  rep.sequences = opts.num_sequences;
  for (const auto& r : res) {
    rep.max_observed_gap = std::max(rep.max_observed_gap, r.gap);
    if (r.gap > opts.lambda + 1e-6) ++rep.violations;
    if (r.undefined) ++rep.undefined_runs;
  }
  return rep;
}

}  // namespace ism

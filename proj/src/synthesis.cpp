#include "ism/synthesis.hpp"

#include <chrono>
#include <deque>
#include <limits>
#include <sstream>

namespace ism {

namespace {

struct Candidate {
  bool skipped = false;
  Belief target;
  Verdict fresh;
};

}  // namespace

SynthesisOutcome synthesize(const GameInstance& g, const SynthesisOptions& opts) {
  if (!(opts.lambda > 0.0)) throw std::invalid_argument("synthesize: lambda must be positive");
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const auto sigma = nonzero_observations(g);
  std::optional<double> floor;
  if (opts.floor_at_min_entry) floor = g.switching.min_entry();
  EdgeChecker checker(g, opts.lambda, floor, opts.exec);

  Ism ism(sigma);
  ism.add_state(uniform_belief(g.num_policies()));
  std::deque<Index> work{0};
  SynthesisStats stats;
  auto finish = [&] {
    stats.states = ism.num_states();
    stats.edges = ism.num_edges();
    stats.consistency_checks = checker.queries();
    stats.cache_hits = checker.cache_hits();
    stats.elapsed_seconds = elapsed();
    return stats;
  };

  const auto nsig = static_cast<std::int64_t>(sigma.size());
  std::vector<Candidate> cand(sigma.size());

  while (!work.empty()) {
    if (elapsed() > opts.max_seconds) return BudgetExceeded{"time limit reached", finish()};
    Index m;
    if (opts.order == WorklistOrder::fifo) {
      m = work.front();
      work.pop_front();
    } else {
      m = work.back();
      work.pop_back();
    }
    const Belief bm = ism.belief(m);

    // Fresh-edge checks depend only on b(m), so they run ahead of the
    // sequential pass that mutates the machine.
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1) if (opts.exec == Exec::parallel)
    for (std::int64_t k = 0; k < nsig; ++k) {
      try {
        auto& c = cand[static_cast<std::size_t>(k)];
        const auto& o = sigma[static_cast<std::size_t>(k)];
        const auto alphas = g.alphas(o);
        c.skipped = observation_probability(bm, alphas) <= kZeroProbability;
        if (c.skipped) continue;
        c.target = transform(bm, o, g);
        c.fresh = checker.check(bm, c.target, o);
      } catch (...) {
#pragma omp critical(synth_error)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);

    for (std::size_t k = 0; k < sigma.size(); ++k) {
      const auto& o = sigma[k];
      auto& c = cand[k];
      if (c.skipped) {
        std::ostringstream w;
        w << "state " << m << ": observation (" << o.state << ", " << o.action
          << ") has zero probability; no edge";
        stats.warnings.push_back(w.str());
        continue;
      }
      if (!c.fresh.consistent()) {
        return SynthesisFailure{m, bm, o, c.target, *c.fresh.refutation, finish()};
      }
      Index best = Ism::kUndefined;
      double best_d = std::numeric_limits<double>::infinity();
      for (Index s = 0; s < ism.num_states(); ++s) {
        const double d = tv_distance(ism.belief(s), c.target);
        if (d <= opts.lambda && d < best_d) {
          best = s;
          best_d = d;
        }
      }
      if (best != Ism::kUndefined && checker.check(bm, ism.belief(best), o).consistent()) {
        ism.set_edge(m, k, best);
        continue;
      }
      if (ism.num_states() >= opts.max_states)
        return BudgetExceeded{"state limit reached", finish()};
      const Index fresh = ism.add_state(c.target);
      ism.set_edge(m, k, fresh);
      work.push_back(fresh);
    }
  }
  auto final_stats = finish();
  return SynthesisSuccess{std::move(ism), std::move(final_stats)};
}

}  // namespace ism

#include "ism/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "ism/random.hpp"

namespace ism {

Index ComposedMdp::index_of(Index s, Index m) const {
  const std::size_t nm = lookup.size() / std::max<std::size_t>(num_game_states, 1);
  if (s >= num_game_states || m >= nm) return kUnreached;
  return lookup[s * nm + m];
}

ComposedMdp compose(const GameInstance& g, const Ism& ism) {
  const auto& a = g.arena;
  const std::size_t S = a.num_states(), M = ism.num_states(), A1 = a.num_p1_actions(),
                    A2 = a.num_p2_actions();
  ComposedMdp c;
  c.num_game_states = S;
  c.lookup.assign(S * M, ComposedMdp::kUnreached);

  auto intern = [&](Index s, Index m, std::deque<Index>& q) {
    Index& slot = c.lookup[s * M + m];
    if (slot == ComposedMdp::kUnreached) {
      slot = c.pairs.size();
      c.pairs.emplace_back(s, m);
      q.push_back(slot);
    }
    return slot;
  };

  std::deque<Index> queue;
  intern(a.initial_state(), ism.initial(), queue);
  std::vector<std::vector<Successor>> rows;
  std::vector<double> rewards;
  std::vector<double> acc;
  while (!queue.empty()) {
    const Index k = queue.front();
    queue.pop_front();
    const auto [s, m] = c.pairs[k];
    const auto pa2 = action_distribution(ism.belief(m), s, g);
    std::vector<Index> succ(A2, Ism::kUndefined);
    for (Index a2 = 0; a2 < A2; ++a2) {
      if (pa2[a2] <= kZeroProbability) continue;
      auto d = advance(ism, m, {s, a2});
      if (!d)
        throw IsmMismatch("observation (" + a.state_names()[s] + ", " + a.p2_action_names()[a2] +
                          ") has positive probability at ISM state " + std::to_string(m) +
                          " but no transition");
      succ[a2] = *d;
    }
    rows.resize(c.pairs.size() * A1);
    rewards.resize(c.pairs.size() * A1);
    for (Index a1 = 0; a1 < A1; ++a1) {
      std::vector<Successor> row;
      double r = 0.0;
      for (Index a2 = 0; a2 < A2; ++a2) {
        if (succ[a2] == Ism::kUndefined) continue;
        r += pa2[a2] * a.reward(s, a1, a2);
        auto next = a.next(s, a1, a2);
        for (Index s2 = 0; s2 < S; ++s2) {
          if (next[s2] == 0.0) continue;
          const Index t = intern(s2, succ[a2], queue);
          const double p = pa2[a2] * next[s2];
          auto it = std::find_if(row.begin(), row.end(), [t](const Successor& x) { return x.state == t; });
          if (it == row.end()) row.push_back({t, p});
          else it->prob += p;
        }
      }
      rows.resize(c.pairs.size() * A1);
      rewards.resize(c.pairs.size() * A1);
      rows[k * A1 + a1] = std::move(row);
      rewards[k * A1 + a1] = r;
    }
  }
  c.mdp = Mdp(c.pairs.size(), A1);
  c.mdp.next = std::move(rows);
  c.mdp.reward = std::move(rewards);
  c.mdp.next.resize(c.pairs.size() * A1);
  c.mdp.reward.resize(c.pairs.size() * A1);
  return c;
}

std::optional<Index> PlannerPolicy::action(Index s, Index m) const {
  const Index k = composed.index_of(s, m);
  if (k == ComposedMdp::kUnreached) return std::nullopt;
  return plan.policy[k];
}

double PlannerPolicy::value(Index s, Index m) const {
  const Index k = composed.index_of(s, m);
  if (k == ComposedMdp::kUnreached) throw std::out_of_range("unreachable composed state");
  return plan.values[k];
}

PlannerPolicy plan(const GameInstance& g, const Ism& ism, const PlanOptions& opts) {
  PlannerPolicy p{compose(g, ism), {}};
  p.plan = policy_iteration(p.composed.mdp, opts);
  return p;
}

double exact_expected_reward(Index s, const Belief& b, Index a1, const GameInstance& g) {
  const auto pa2 = action_distribution(b, s, g);
  double r = 0.0;
  for (Index a2 = 0; a2 < pa2.size(); ++a2) r += pa2[a2] * g.arena.reward(s, a1, a2);
  return r;
}

std::vector<ExactSuccessor> exact_transition(Index s, const Belief& b, Index a1, const GameInstance& g) {
  std::vector<ExactSuccessor> out;
  const auto pa2 = action_distribution(b, s, g);
  for (Index a2 = 0; a2 < pa2.size(); ++a2) {
    if (pa2[a2] <= kZeroProbability) continue;
    const Belief nb = transform(b, {s, a2}, g);
    auto next = g.arena.next(s, a1, a2);
    for (Index s2 = 0; s2 < next.size(); ++s2)
      if (next[s2] > 0.0) out.push_back({s2, a2, pa2[a2] * next[s2], nb});
  }
  return out;
}

namespace {

struct EpisodeReturns {
  double composed = 0.0, exact = 0.0;
  std::size_t undefined = 0;
};

EpisodeReturns run_episode(const GameInstance& g, const Ism& ism, const PlannerPolicy& pol,
                           double gamma, std::size_t horizon, Rng rng) {
  EpisodeReturns out;
  const auto& a = g.arena;
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // (a) composed dynamics: sample directly from the P-hat rows.
  {
    Index k = 0;
    double disc = 1.0;
    Rng local = rng;
    for (std::size_t t = 0; t < horizon; ++t) {
      const Index act = pol.plan.policy[k];
      out.composed += disc * pol.composed.mdp.r(k, act);
      const auto& row = pol.composed.mdp.row(k, act);
      double x = u(local);
      Index nk = row.back().state;
      for (const auto& sx : row) {
        if (x < sx.prob) {
          nk = sx.state;
          break;
        }
        x -= sx.prob;
      }
      k = nk;
      disc *= gamma;
    }
  }
  // (b) exact belief dynamics; the policy reads the ISM state.
  {
    Index s = a.initial_state(), m = ism.initial();
    Belief b = uniform_belief(g.num_policies());
    double disc = 1.0;
    Rng local = rng;
    for (std::size_t t = 0; t < horizon; ++t) {
      auto act = pol.action(s, m);
      const Index a1 = act ? *act : 0;
      out.exact += disc * exact_expected_reward(s, b, a1, g);
      const auto pa2 = action_distribution(b, s, g);
      const Index a2 = sample_index(pa2, local);
      const Index s2 = sample_index(a.next(s, a1, a2), local);
      auto d = advance(ism, m, {s, a2});
      b = transform(b, {s, a2}, g);
      if (d) {
        m = *d;
      } else {
        ++out.undefined;
        m = ism.initial();
      }
      s = s2;
      disc *= gamma;
    }
  }
  return out;
}

}  // namespace

ValueGapReport value_gap_estimate(const GameInstance& g, const Ism& ism, const PlannerPolicy& pol,
                                  double gamma, std::size_t episodes, std::size_t horizon,
                                  std::uint64_t seed, Exec exec) {
  std::vector<EpisodeReturns> res(episodes);
  const auto ne = static_cast<std::int64_t>(episodes);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t k = 0; k < ne; ++k)
    res[static_cast<std::size_t>(k)] =
        run_episode(g, ism, pol, gamma, horizon, make_stream(seed, static_cast<std::uint64_t>(k)));

  ValueGapReport r;
  r.episodes = episodes;
  r.horizon = horizon;
  auto stats = [&](auto f, double& mean, double& se) {
    double s = 0.0, s2 = 0.0;
    for (const auto& e : res) {
      const double x = f(e);
      s += x;
      s2 += x * x;
    }
    const double n = static_cast<double>(std::max<std::size_t>(episodes, 1));
    mean = s / n;
    const double var = episodes > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
    se = std::sqrt(var / n);
  };
  stats([](const EpisodeReturns& e) { return e.composed; }, r.composed_mean, r.composed_stderr);
  stats([](const EpisodeReturns& e) { return e.exact; }, r.exact_mean, r.exact_stderr);
  stats([](const EpisodeReturns& e) { return e.exact - e.composed; }, r.gap, r.gap_stderr);
  for (const auto& e : res) r.undefined_steps += e.undefined;
  double rmax = 0.0;
  for (Index s = 0; s < g.arena.num_states(); ++s)
    for (Index a1 = 0; a1 < g.arena.num_p1_actions(); ++a1)
      for (Index a2 = 0; a2 < g.arena.num_p2_actions(); ++a2)
        rmax = std::max(rmax, std::abs(g.arena.reward(s, a1, a2)));
  r.truncation_bound = std::pow(gamma, static_cast<double>(horizon)) * rmax / (1.0 - gamma);
  return r;
}

}  // namespace ism

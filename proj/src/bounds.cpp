#include "ism/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ism/belief.hpp"
#include "ism/planner.hpp"
#include "ism/random.hpp"

namespace ism {

namespace {

std::pair<double, double> alpha_stats(const Observation& o, const GameInstance& g) {
  double mx = 0.0, sum = 0.0;
  for (const auto& p : g.policies) {
    const double a = p.prob(o.state, o.action);
    mx = std::max(mx, a);
    sum += a;
  }
  if (!(mx > 0.0)) throw std::invalid_argument("observation has zero probability under every policy");
  return {mx, sum};
}

}  // namespace

double min_entry(const SwitchModel& t) { return t.min_entry(); }

double kappa(const Observation& o, const GameInstance& g) {
  const auto [mx, sum] = alpha_stats(o, g);
  return mx / (sum + static_cast<double>(g.num_policies()) * mx);
}

double kappa_max(const GameInstance& g) {
  double k = 0.0;
  for (const auto& o : nonzero_observations(g)) k = std::max(k, kappa(o, g));
  return k;
}

TerminationGuarantee termination_guarantee(const GameInstance& g) {
  TerminationGuarantee t;
  t.t_star = min_entry(g.switching);
  t.kappa_max = kappa_max(g);
  t.guaranteed = t.t_star > t.kappa_max;
  return t;
}

double contraction_factor(const Observation& o, const GameInstance& g) {
  const double ts = min_entry(g.switching);
  if (!(ts > 0.0)) throw std::domain_error("contraction factor needs t* > 0");
  const auto [mx, sum] = alpha_stats(o, g);
  return (1.0 - static_cast<double>(g.num_policies()) * ts) * mx / (ts * sum);
}

double induced_one_norm(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
  double best = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < rows; ++i) c += std::abs(m[i * cols + j]);
    best = std::max(best, c);
  }
  return best;
}

double switch_gap_norm(const SwitchModel& ta, const SwitchModel& td) {
  const std::size_t n = ta.size();
  if (td.size() != n) throw std::invalid_argument("switch matrices differ in size");
  std::vector<double> dt(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dt[j * n + i] = ta(i, j) - td(i, j);
  return induced_one_norm(dt, n, n);
}

double robustness_L(const SwitchModel& ta, const SwitchModel& td, const GameInstance& g) {
  const double a = min_entry(ta), d = min_entry(td);
  if (!(a > 0.0) || !(d > 0.0)) throw std::domain_error("robustness needs positive t_a* and t_d*");
  const double n = static_cast<double>(g.num_policies());
  double L = 0.0;
  for (const auto& o : nonzero_observations(g)) {
    const auto [mx, sum] = alpha_stats(o, g);
    L = std::max(L, (1.0 - n * std::max(a, d)) * mx / (std::min(a, d) * sum));
  }
  return L;
}

std::optional<double> robust_lambda(const SwitchModel& ta, const SwitchModel& td,
                                    const GameInstance& g, double lambda) {
  const double L = robustness_L(ta, td, g);
  if (L >= 1.0) return std::nullopt;
  return (lambda + switch_gap_norm(ta, td)) / (1.0 - L);
}

double r_max(Index s, const GameInstance& g) {
  double r = 0.0;
  for (Index a1 = 0; a1 < g.arena.num_p1_actions(); ++a1)
    for (Index a2 = 0; a2 < g.arena.num_p2_actions(); ++a2)
      r = std::max(r, std::abs(g.arena.reward(s, a1, a2)));
  return r;
}

double alpha_max_state(Index s, const GameInstance& g) {
  double total = 0.0;
  for (Index a2 = 0; a2 < g.arena.num_p2_actions(); ++a2) {
    double mx = 0.0;
    for (const auto& p : g.policies) mx = std::max(mx, p.prob(s, a2));
    total += mx;
  }
  return total;
}

BoundReport bound_report(const GameInstance& g) {
  BoundReport r;
  r.t_star = min_entry(g.switching);
  for (const auto& o : nonzero_observations(g)) {
    const auto [mx, sum] = alpha_stats(o, g);
    ObservationBound b{o, mx, sum, kappa(o, g), std::nullopt};
    if (r.t_star > 0.0) b.contraction = contraction_factor(o, g);
    r.kappa_max = std::max(r.kappa_max, b.kappa);
    r.observations.push_back(b);
  }
  r.termination_guaranteed = r.t_star > r.kappa_max;
  for (Index s = 0; s < g.arena.num_states(); ++s) {
    r.r_max.push_back(r_max(s, g));
    r.alpha_max.push_back(alpha_max_state(s, g));
  }
  return r;
}

namespace {

struct HistoryResult {
  double reward = 0.0, transition = 0.0, reward_ratio = 0.0, transition_ratio = 0.0, gap = 0.0;
  std::size_t steps = 0, undefined = 0;
};

double ratio(double x, double bound) {
  if (bound > 0.0) return x / bound;
  return x > 1e-15 ? std::numeric_limits<double>::infinity() : 0.0;
}

HistoryResult sample_history(const GameInstance& g, const Ism& ism, double lambda,
                             std::size_t max_len, Rng rng) {
  const auto& a = g.arena;
  const std::size_t A1 = a.num_p1_actions(), A2 = a.num_p2_actions(), S = a.num_states();
  HistoryResult h;
  Index s = a.initial_state(), m = ism.initial();
  Belief b = uniform_belief(g.num_policies());
  std::uniform_int_distribution<Index> pick_a1(0, A1 - 1);
  for (std::size_t t = 0; t <= max_len; ++t) {
    const Belief& bm = ism.belief(m);
    h.gap = std::max(h.gap, tv_distance(bm, b));
    const auto pe = action_distribution(b, s, g);
    const auto ph = action_distribution(bm, s, g);
    const double rb = r_max(s, g) * alpha_max_state(s, g) * lambda;
    const double tb = alpha_max_state(s, g) * lambda;
    for (Index a1 = 0; a1 < A1; ++a1) {
      const double rd =
          std::abs(exact_expected_reward(s, b, a1, g) - exact_expected_reward(s, bm, a1, g));
      // P* and P-hat move along the same observation (s, a2), so their
      // successor pairs match term by term.
      double td = 0.0;
      for (Index a2 = 0; a2 < A2; ++a2) {
        auto next = a.next(s, a1, a2);
        for (Index s2 = 0; s2 < S; ++s2) td += std::abs(pe[a2] - ph[a2]) * next[s2];
      }
      h.reward = std::max(h.reward, rd);
      h.transition = std::max(h.transition, td);
      h.reward_ratio = std::max(h.reward_ratio, ratio(rd, rb));
      h.transition_ratio = std::max(h.transition_ratio, ratio(td, tb));
    }
    ++h.steps;
    if (t == max_len) break;
    const Index a1 = pick_a1(rng);
    const Index a2 = sample_index(pe, rng);
    const Index s2 = sample_index(a.next(s, a1, a2), rng);
    auto d = advance(ism, m, {s, a2});
    b = transform(b, {s, a2}, g);
    if (!d) {
      ++h.undefined;
      break;
    }
    m = *d;
    s = s2;
  }
  return h;
}

}  // namespace

DiscrepancyReport check_discrepancy_bounds(const GameInstance& g, const Ism& ism, double lambda,
                                           std::size_t histories, std::size_t max_len,
                                           std::uint64_t seed, Exec exec) {
  std::vector<HistoryResult> res(histories);
  const auto nh = static_cast<std::int64_t>(histories);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t k = 0; k < nh; ++k)
    res[static_cast<std::size_t>(k)] =
        sample_history(g, ism, lambda, max_len, make_stream(seed, static_cast<std::uint64_t>(k)));
  DiscrepancyReport r;
  r.histories = histories;
  for (const auto& h : res) {
    r.steps += h.steps;
    r.undefined_steps += h.undefined;
    r.max_reward_discrepancy = std::max(r.max_reward_discrepancy, h.reward);
    r.max_transition_discrepancy = std::max(r.max_transition_discrepancy, h.transition);
    r.max_reward_ratio = std::max(r.max_reward_ratio, h.reward_ratio);
    r.max_transition_ratio = std::max(r.max_transition_ratio, h.transition_ratio);
    r.max_belief_gap = std::max(r.max_belief_gap, h.gap);
  }
  return r;
}

}  // namespace ism

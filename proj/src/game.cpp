#include "ism/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ism {

GameArena::GameArena(std::vector<std::string> states, std::vector<std::string> p1_actions,
                     std::vector<std::string> p2_actions)
    : states_(std::move(states)),
      p1_actions_(std::move(p1_actions)),
      p2_actions_(std::move(p2_actions)) {
  const std::size_t triples = states_.size() * p1_actions_.size() * p2_actions_.size();
  transition_.assign(triples * states_.size(), 0.0);
  reward_.assign(triples, 0.0);
}

std::span<const double> GameArena::next(Index s, Index a1, Index a2) const {
  return {transition_.data() + triple(s, a1, a2) * states_.size(), states_.size()};
}

std::span<double> GameArena::next_mut(Index s, Index a1, Index a2) {
  return {transition_.data() + triple(s, a1, a2) * states_.size(), states_.size()};
}

SwitchModel::SwitchModel(std::size_t n, std::vector<double> row_major)
    : n_(n), m_(std::move(row_major)) {
  if (m_.size() != n * n) throw std::invalid_argument("switch matrix must be n x n");
}

double SwitchModel::min_entry() const {
  return m_.empty() ? 0.0 : *std::min_element(m_.begin(), m_.end());
}

std::vector<double> GameInstance::alphas(const Observation& o) const {
  std::vector<double> a(policies.size());
  for (std::size_t i = 0; i < policies.size(); ++i) a[i] = policies[i].prob(o.state, o.action);
  return a;
}

GameInstance GameInstance::with_switch(SwitchModel t) const {
  GameInstance copy = *this;
  copy.switching = std::move(t);
  return copy;
}

namespace {

template <typename... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

// Checks a probability vector; returns an empty string when valid.
std::string check_distribution(std::span<const double> p) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) return cat("negative or non-finite entry ", x);
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbTolerance) return cat("sums to ", sum);
  return {};
}

}  // namespace

ValidationReport validate(const GameInstance& g) {
  ValidationReport rep;
  const auto& a = g.arena;
  const std::size_t S = a.num_states(), A1 = a.num_p1_actions(), A2 = a.num_p2_actions();
  if (S == 0) rep.violations.push_back("arena has no states");
  if (A1 == 0) rep.violations.push_back("player 1 has no actions");
  if (A2 == 0) rep.violations.push_back("player 2 has no actions");
  if (S > 0 && a.initial_state() >= S) rep.violations.push_back("initial state out of range");

  for (Index s = 0; s < S; ++s)
    for (Index a1 = 0; a1 < A1; ++a1)
      for (Index a2 = 0; a2 < A2; ++a2) {
        if (auto err = check_distribution(a.next(s, a1, a2)); !err.empty())
          rep.violations.push_back(cat("transition (", a.state_names()[s], ", ",
                                       a.p1_action_names()[a1], ", ", a.p2_action_names()[a2],
                                       ") ", err));
        if (!std::isfinite(a.reward(s, a1, a2)))
          rep.violations.push_back(cat("reward (", s, ", ", a1, ", ", a2, ") is not finite"));
      }

  const std::size_t n = g.policies.size();
  if (n == 0) rep.violations.push_back("no opponent policies");
  for (const auto& p : g.policies) {
    if (p.num_actions != A2 || p.choice.size() != S * A2) {
      rep.violations.push_back(cat("policy ", p.name, " is not defined on every state"));
      continue;
    }
    for (Index s = 0; s < S; ++s)
      if (auto err = check_distribution(p.at(s)); !err.empty())
        rep.violations.push_back(cat("policy ", p.name, " at state ", a.state_names()[s], " ", err));
  }

  const auto& t = g.switching;
  if (t.size() != n) {
    rep.violations.push_back(cat("switch matrix is ", t.size(), "x", t.size(), " but there are ",
                                 n, " policies"));
  } else {
    for (Index i = 0; i < n; ++i)
      if (auto err = check_distribution(t.row(i)); !err.empty())
        rep.violations.push_back(cat("switch row ", i, " ", err));
    if (n > 0 && t.min_entry() <= 0.0)
      rep.warnings.push_back("positivity: switch matrix has a zero entry (t* = 0)");
  }
  return rep;
}

std::vector<Observation> nonzero_observations(const GameInstance& g) {
  std::vector<Observation> out;
  const auto S = g.arena.num_states(), A2 = g.arena.num_p2_actions();
  for (Index s = 0; s < S; ++s)
    for (Index a2 = 0; a2 < A2; ++a2)
      for (const auto& p : g.policies)
        if (p.prob(s, a2) > 0.0) {
          out.push_back({s, a2});
          break;
        }
  return out;
}

SwitchModel build_switch(std::size_t n, double stay) {
  if (n < 2) throw std::domain_error("build_switch: need at least two policies");
  if (!(stay > 0.0 && stay < 1.0)) throw std::domain_error("build_switch: stay must be in (0, 1)");
  const double off = (1.0 - stay) / static_cast<double>(n - 1);
  std::vector<double> m(n * n, off);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = stay;
  return SwitchModel(n, std::move(m));
}

}  // namespace ism

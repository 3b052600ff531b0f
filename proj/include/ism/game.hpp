#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ism {

using Index = std::size_t;

/// Probability-sum tolerance used by validation and the file loader.
inline constexpr double kProbTolerance = 1e-9;

/// A (game state, player-2 action) pair; the ISM alphabet ranges over these.
struct Observation {
  Index state = 0;
  Index action = 0;
  auto operator<=>(const Observation&) const = default;
};

/// Concurrent stochastic game arena. Transition and reward tables are dense
/// and indexed by (s, a1, a2).
class GameArena {
 public:
  GameArena() = default;
  GameArena(std::vector<std::string> states, std::vector<std::string> p1_actions,
            std::vector<std::string> p2_actions);

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_p1_actions() const { return p1_actions_.size(); }
  std::size_t num_p2_actions() const { return p2_actions_.size(); }

  const std::vector<std::string>& state_names() const { return states_; }
  const std::vector<std::string>& p1_action_names() const { return p1_actions_; }
  const std::vector<std::string>& p2_action_names() const { return p2_actions_; }

  /// Distribution over next states for the joint move (s, a1, a2).
  std::span<const double> next(Index s, Index a1, Index a2) const;
  std::span<double> next_mut(Index s, Index a1, Index a2);
  double transition(Index s, Index a1, Index a2, Index next_state) const {
    return next(s, a1, a2)[next_state];
  }

  double reward(Index s, Index a1, Index a2) const { return reward_[triple(s, a1, a2)]; }
  void set_reward(Index s, Index a1, Index a2, double r) { reward_[triple(s, a1, a2)] = r; }

  Index initial_state() const { return initial_state_; }
  void set_initial_state(Index s) { initial_state_ = s; }

 private:
  std::size_t triple(Index s, Index a1, Index a2) const {
    return (s * p1_actions_.size() + a1) * p2_actions_.size() + a2;
  }

  std::vector<std::string> states_, p1_actions_, p2_actions_;
  std::vector<double> transition_;  // |S|*|A1|*|A2| rows of length |S|
  std::vector<double> reward_;
  Index initial_state_ = 0;
};

/// pi(s, a2) for every state, stored row-major |S| x |A2|.
struct OpponentPolicy {
  std::string name;
  std::size_t num_actions = 0;
  std::vector<double> choice;

  double prob(Index s, Index a2) const { return choice[s * num_actions + a2]; }
  std::span<const double> at(Index s) const {
    return {choice.data() + s * num_actions, num_actions};
  }
};

/// Row-stochastic policy-change matrix; entry (i, j) is P(pi_j | pi_i).
class SwitchModel {
 public:
  SwitchModel() = default;
  SwitchModel(std::size_t n, std::vector<double> row_major);

  std::size_t size() const { return n_; }
  double operator()(Index i, Index j) const { return m_[i * n_ + j]; }
  std::span<const double> row(Index i) const { return {m_.data() + i * n_, n_}; }
  const std::vector<double>& data() const { return m_; }
  double min_entry() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> m_;
};

struct GameInstance {
  GameArena arena;
  std::vector<OpponentPolicy> policies;
  SwitchModel switching;

  std::size_t num_policies() const { return policies.size(); }
  /// alpha_i = pi_i(o) for every policy.
  std::vector<double> alphas(const Observation& o) const;
  /// Returns a copy with a different switch matrix.
  GameInstance with_switch(SwitchModel t) const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

/// Checks every type invariant of the instance. A switch matrix with a zero
/// entry is reported as a "positivity" warning: the belief lower bound then
/// degenerates to 0.
ValidationReport validate(const GameInstance& instance);

/// Sigma' = {(s, a2) | some pi_i(s, a2) > 0}, ordered by (state, action).
/// This order is the canonical iteration order everywhere downstream.
std::vector<Observation> nonzero_observations(const GameInstance& instance);

/// T with `stay` on the diagonal and (1 - stay)/(n - 1) elsewhere.
SwitchModel build_switch(std::size_t n, double stay);

/// Rock-paper-scissors against four mixed policies with the hand-tuned
/// switch matrix (diagonal 0.55, 0.55, 0.64, 0.64).
GameInstance build_rps();
SwitchModel rps_reference_switch();

/// RPS with one-step memory of the joint move; nine opponent policies.
/// The switch matrix defaults to build_switch(9, stay).
GameInstance build_rps_mem(double stay = 0.4);

/// Circular corridor with N cells, players on (i, j). Requires N >= 10.
GameInstance build_anticipate_avoid(int cells, double stay = 0.45);

/// Circular distance between two cells on a ring of N cells (1-based).
int ring_distance(int i, int j, int cells);

}  // namespace ism

#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ism/belief.hpp"
#include "ism/machine.hpp"
#include "ism/mdp.hpp"

namespace ism {

/// Reachable product of game and ISM. Composed state k stands for pairs[k] = (s, m);
/// state 0 is (s0, m0).
struct ComposedMdp {
  Mdp mdp;
  std::vector<std::pair<Index, Index>> pairs;
  std::size_t num_game_states = 0;
  std::vector<Index> lookup;  // s * |M| + m -> composed index or kUnreached

  static constexpr Index kUnreached = static_cast<Index>(-1);
  Index index_of(Index s, Index m) const;
  std::size_t size() const { return pairs.size(); }
};

class IsmMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds P-hat and R-hat by forward search from (s0, m0) over all player-1 actions.
ComposedMdp compose(const GameInstance& g, const Ism& ism);

/// Player-1 policy on composed states together with its values.
struct PlannerPolicy {
  ComposedMdp composed;
  PlanResult plan;
  /// Action for (s, m); nullopt if the pair is unreachable.
  std::optional<Index> action(Index s, Index m) const;
  double value(Index s, Index m) const;
};

PlannerPolicy plan(const GameInstance& g, const Ism& ism, const PlanOptions& opts = {});

/// R*((s, b), a1) = sum_a2 P(a2 | b) R(s, a1, a2).
double exact_expected_reward(Index s, const Belief& b, Index a1, const GameInstance& g);

struct ExactSuccessor {
  Index next_state;
  Index p2_action;
  double prob;
  Belief belief;
};

/// Successors of (s, b) under a1 in the exact belief MDP.
std::vector<ExactSuccessor> exact_transition(Index s, const Belief& b, Index a1, const GameInstance& g);

struct ValueGapReport {
  double composed_mean = 0.0, composed_stderr = 0.0;
  double exact_mean = 0.0, exact_stderr = 0.0;
  double gap = 0.0, gap_stderr = 0.0;
  double truncation_bound = 0.0;
  std::size_t episodes = 0, horizon = 0;
  /// Exact-dynamics steps where the ISM had no successor (reset to m0).
  std::size_t undefined_steps = 0;
};

/// Discounted return of the planner policy under (a) composed dynamics and
/// (b) exact belief dynamics. Episode k of both runs shares one random stream.
ValueGapReport value_gap_estimate(const GameInstance& g, const Ism& ism, const PlannerPolicy& pol,
                                  double gamma, std::size_t episodes, std::size_t horizon,
                                  std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace ism

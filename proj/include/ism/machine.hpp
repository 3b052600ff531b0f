#pragma once

#include <optional>
#include <vector>

#include "ism/belief.hpp"
#include "ism/game.hpp"

namespace ism {

/// Deterministic finite machine over an observation alphabet; every state
/// carries a belief. Transitions are stored densely per (state, letter).
class InformationStateMachine {
 public:
  static constexpr Index kUndefined = static_cast<Index>(-1);

  InformationStateMachine() = default;
  explicit InformationStateMachine(std::vector<Observation> alphabet);

  Index add_state(Belief b);
  void set_edge(Index m, Index letter, Index dst);
  void set_edge(Index m, const Observation& o, Index dst);

  std::size_t num_states() const { return beliefs_.size(); }
  std::size_t num_edges() const;
  const Belief& belief(Index m) const { return beliefs_.at(m); }
  const std::vector<Belief>& beliefs() const { return beliefs_; }
  const std::vector<Observation>& alphabet() const { return alphabet_; }
  Index initial() const { return 0; }

  /// Position of o in the alphabet, if present.
  std::optional<Index> letter(const Observation& o) const;
  /// Raw successor by letter index; kUndefined when absent.
  Index successor(Index m, Index letter) const { return next_[m * alphabet_.size() + letter]; }

  bool operator==(const InformationStateMachine&) const = default;

 private:
  std::vector<Observation> alphabet_;
  std::vector<Belief> beliefs_;
  std::vector<Index> next_;
};

using Ism = InformationStateMachine;

/// delta(m, o). Throws std::out_of_range for an invalid state.
std::optional<Index> advance(const Ism& ism, Index m, const Observation& o);

struct RunResult {
  std::optional<Index> state;
  /// Index of the observation that had no successor.
  std::optional<std::size_t> failed_at;
};

RunResult run(const Ism& ism, std::span<const Observation> seq);

}  // namespace ism

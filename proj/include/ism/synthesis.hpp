#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ism/consistency.hpp"
#include "ism/exec.hpp"
#include "ism/machine.hpp"

namespace ism {

enum class WorklistOrder { fifo, lifo };

struct SynthesisOptions {
  double lambda = 0.1;
  std::size_t max_states = 100000;
  double max_seconds = 3600.0;
  WorklistOrder order = WorklistOrder::fifo;
  /// Restrict edge checks to beliefs with every entry >= t* (the region all
  /// reachable exact beliefs lie in once T is positive). Off by default.
  bool floor_at_min_entry = false;
  Exec exec = Exec::parallel;
};

struct SynthesisStats {
  std::size_t states = 0;
  std::size_t edges = 0;
  std::size_t consistency_checks = 0;
  std::size_t cache_hits = 0;
  double elapsed_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct SynthesisSuccess {
  Ism machine;
  SynthesisStats stats;
};

/// The inconsistent fresh edge that stopped the worklist.
struct SynthesisFailure {
  Index source_state = 0;
  Belief source_belief;
  Observation observation;
  Belief attempted_target;
  Refutation witness;
  SynthesisStats stats;
};

struct BudgetExceeded {
  std::string reason;
  SynthesisStats stats;
};

using SynthesisOutcome = std::variant<SynthesisSuccess, SynthesisFailure, BudgetExceeded>;

SynthesisOutcome synthesize(const GameInstance& g, const SynthesisOptions& opts);

}  // namespace ism

#pragma once

#include <cstdint>
#include <vector>

#include "ism/consistency.hpp"
#include "ism/machine.hpp"

namespace ism {

struct EdgeDefect {
  Index source = 0;
  Observation observation;
  Index target = 0;
  Refutation refutation;
};

struct VerifyReport {
  std::size_t edges_checked = 0;
  std::vector<EdgeDefect> inconsistent_edges;
  std::size_t sequences = 0;
  double max_observed_gap = 0.0;
  /// Sampled sequences whose gap exceeded lambda + 1e-6 at some prefix.
  std::size_t violations = 0;
  /// Sampled sequences that hit an undefined machine transition.
  std::size_t undefined_runs = 0;
  bool ok() const { return inconsistent_edges.empty() && violations == 0 && undefined_runs == 0; }
};

struct VerifyOptions {
  double lambda = 0.1;
  std::size_t num_sequences = 10000;
  std::size_t max_len = 50;
  std::uint64_t seed = 1;
  bool check_edges = true;
  Exec exec = Exec::parallel;
};

/// Re-checks every edge with check_edge, then samples observation sequences
/// (each letter drawn proportional to P(o | exact belief)) and records the
/// largest tv gap between b(m) and the exact belief over all prefixes.
VerifyReport verify_consistency(const Ism& ism, const GameInstance& g, const VerifyOptions& opts);

}  // namespace ism

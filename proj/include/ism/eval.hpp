#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ism/belief.hpp"
#include "ism/planner.hpp"

namespace ism {

struct TraceStep {
  Index state = 0;
  /// Opponent policy in force; absent for scripted replays.
  std::optional<Index> policy;
  Index a1 = 0, a2 = 0;
  double reward = 0.0;
  Index ism_state = 0;
  /// Exact belief before the step, tracked with the design switch matrix.
  Belief exact;
  /// Exact belief tracked with the actual switch matrix, when requested.
  std::optional<Belief> exact_actual;
  /// The ISM had no successor after this step and was reset to m0.
  bool reset = false;
};

using EpisodeTrace = std::vector<TraceStep>;

struct SimulateOptions {
  bool track_actual_belief = false;
};

/// Plays policy1 against an opponent that switches policies by t_actual.
EpisodeTrace simulate(const GameInstance& design, const Ism& ism, const PlannerPolicy& policy1,
                      const SwitchModel& t_actual, std::size_t horizon, std::uint64_t seed,
                      const SimulateOptions& opts = {});

class ReplayError : public std::runtime_error {
 public:
  ReplayError(const std::string& what, std::size_t index);
  std::size_t index;
};

/// Like simulate, with the opponent's observations read from `script`. Game
/// states are taken from the script.
EpisodeTrace replay(const GameInstance& design, const Ism& ism, const PlannerPolicy& policy1,
                    const std::vector<Observation>& script, std::size_t horizon);

struct MetricsReport {
  double r_avg = 0.0;
  double ap_avg = 0.0;
  /// Mean of b(m_t)[j_t]; absent when no step records the opponent policy.
  std::optional<double> policy_pred;
  std::size_t steps = 0;
  std::size_t resets = 0;
};

MetricsReport metrics(const EpisodeTrace& trace, const Ism& ism, const GameInstance& g);

struct GridSpec {
  std::vector<double> lambdas;
  std::vector<double> stays;
  std::vector<double> actual_stays;
  std::size_t horizon = 100000;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t max_states = 100000;
  double max_seconds = 3600.0;
  double gamma = 0.95;
  /// Fill the synth/plan timing columns. Off keeps the CSV byte-reproducible.
  bool timing = false;
};

struct GridRow {
  double lambda = 0.0, stay_design = 0.0, stay_actual = 0.0;
  std::string status;  // "ok", "fail" or "budget"
  double r_avg = 0.0, r_avg_se = 0.0;
  double ap_avg = 0.0, ap_avg_se = 0.0;
  double policy_pred = 0.0, policy_pred_se = 0.0;
  std::size_t ism_states = 0;
  double synth_seconds = 0.0, plan_seconds = 0.0;
};

std::vector<GridRow> run_grid(const GameInstance& instance, const GridSpec& spec, Exec exec = Exec::parallel);
void write_grid_csv(std::ostream& os, const GridSpec& spec, const std::vector<GridRow>& rows);

}  // namespace ism

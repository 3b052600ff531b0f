#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ism/exec.hpp"
#include "ism/game.hpp"
#include "ism/machine.hpp"

namespace ism {

struct ObservationBound {
  Observation observation;
  double alpha_max = 0.0;
  double alpha_sum = 0.0;
  double kappa = 0.0;
  /// (1 - n t*) alpha_max / (t* alpha_sum); nullopt when t* = 0.
  std::optional<double> contraction;
};

struct BoundReport {
  std::vector<ObservationBound> observations;
  double t_star = 0.0;
  double kappa_max = 0.0;
  bool termination_guaranteed = false;
  std::vector<double> r_max;      // per game state
  std::vector<double> alpha_max;  // per game state: sum_a2 max_i pi_i(s, a2)
};

double min_entry(const SwitchModel& t);
double kappa(const Observation& o, const GameInstance& g);
double kappa_max(const GameInstance& g);

struct TerminationGuarantee {
  bool guaranteed = false;
  double t_star = 0.0;
  double kappa_max = 0.0;
};
TerminationGuarantee termination_guarantee(const GameInstance& g);

double contraction_factor(const Observation& o, const GameInstance& g);

/// Maximum column absolute sum of a row-major rows x cols matrix.
double induced_one_norm(const std::vector<double>& m, std::size_t rows, std::size_t cols);
/// ||(T_A - T_D)^t||_1.
double switch_gap_norm(const SwitchModel& ta, const SwitchModel& td);

double robustness_L(const SwitchModel& ta, const SwitchModel& td, const GameInstance& g);
std::optional<double> robust_lambda(const SwitchModel& ta, const SwitchModel& td,
                                    const GameInstance& g, double lambda);

double r_max(Index s, const GameInstance& g);
double alpha_max_state(Index s, const GameInstance& g);

BoundReport bound_report(const GameInstance& g);

struct DiscrepancyReport {
  std::size_t histories = 0;
  std::size_t steps = 0;
  double max_reward_discrepancy = 0.0;
  double max_transition_discrepancy = 0.0;
  double max_reward_ratio = 0.0;
  double max_transition_ratio = 0.0;
  /// Largest tv(b(m_t), exact belief) seen along the sampled histories.
  double max_belief_gap = 0.0;
  std::size_t undefined_steps = 0;
};

/// Samples game histories (player-1 actions uniform, player-2 actions from the
/// exact belief mixture) and compares R* with R-hat and P* with P-hat at every
/// step for every player-1 action, relative to the per-state discrepancy bounds.
DiscrepancyReport check_discrepancy_bounds(const GameInstance& g, const Ism& ism, double lambda,
                                           std::size_t histories, std::size_t max_len,
                                           std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace ism

#pragma once

#include <stdexcept>
#include <vector>

#include "ism/exec.hpp"
#include "ism/game.hpp"

namespace ism {

struct Successor {
  Index state;
  double prob;
};

/// Finite MDP with sparse transition rows, one per (state, action).
struct Mdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<std::vector<Successor>> next;  // index s * num_actions + a
  std::vector<double> reward;                // index s * num_actions + a

  Mdp() = default;
  Mdp(std::size_t states, std::size_t actions)
      : num_states(states), num_actions(actions), next(states * actions), reward(states * actions, 0.0) {}

  const std::vector<Successor>& row(Index s, Index a) const { return next[s * num_actions + a]; }
  double r(Index s, Index a) const { return reward[s * num_actions + a]; }
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlanResult {
  std::vector<Index> policy;
  std::vector<double> values;
  std::size_t improvements = 0;
};

struct PlanOptions {
  double gamma = 0.95;
  double tol = 1e-10;
  /// Dense direct evaluation up to this many states, Jacobi iteration above.
  std::size_t dense_limit = 5000;
  Exec exec = Exec::parallel;
};

/// One Bellman optimality backup of v. Writes max_a Q(s, a) into `out` and
/// the lowest maximizing action into `greedy` (ties within `tie_eps`).
void bellman_sweep(const Mdp& mdp, const std::vector<double>& v, double gamma,
                   std::vector<double>& out, std::vector<Index>& greedy, Exec exec,
                   double tie_eps = 0.0);

/// max_s |max_a Q_v(s, a) - v(s)|.
double bellman_residual(const Mdp& mdp, const std::vector<double>& v, double gamma,
                        Exec exec = Exec::parallel);

/// Solves (I - gamma P_pi) v = r_pi.
std::vector<double> evaluate_policy(const Mdp& mdp, const std::vector<Index>& policy,
                                    const PlanOptions& opts,
                                    const std::vector<double>* warm_start = nullptr);

/// Howard policy iteration; throws NonConvergence after 10 |S| improvements.
PlanResult policy_iteration(const Mdp& mdp, const PlanOptions& opts = {});

/// Value iteration until the update span is below `span_tol`.
PlanResult value_iteration(const Mdp& mdp, double gamma, double span_tol, Exec exec,
                           std::size_t max_sweeps = 1000000);

/// Row sums deviating from 1 by more than tol.
std::size_t count_bad_rows(const Mdp& mdp, double tol = 1e-9);

}  // namespace ism

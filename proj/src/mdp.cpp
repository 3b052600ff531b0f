#include "ism/mdp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ism {

namespace {

double q_value(const Mdp& mdp, const std::vector<double>& v, double gamma, Index s, Index a) {
  double q = 0.0;
  for (const auto& t : mdp.row(s, a)) q += t.prob * v[t.state];
  return mdp.r(s, a) + gamma * q;
}

void backup_state(const Mdp& mdp, const std::vector<double>& v, double gamma, Index s,
                  double& out, Index& greedy, double tie_eps) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> q(mdp.num_actions);
  for (Index a = 0; a < mdp.num_actions; ++a) {
    q[a] = q_value(mdp, v, gamma, s, a);
    best = std::max(best, q[a]);
  }
  Index arg = 0;
  while (q[arg] < best - tie_eps) ++arg;
  out = best;
  greedy = arg;
}

}  // namespace

void bellman_sweep(const Mdp& mdp, const std::vector<double>& v, double gamma,
                   std::vector<double>& out, std::vector<Index>& greedy, Exec exec,
                   double tie_eps) {
  out.resize(mdp.num_states);
  greedy.resize(mdp.num_states);
  const auto ns = static_cast<std::int64_t>(mdp.num_states);
  if (exec == Exec::serial) {
    for (std::int64_t s = 0; s < ns; ++s)
      backup_state(mdp, v, gamma, static_cast<Index>(s), out[static_cast<std::size_t>(s)],
                   greedy[static_cast<std::size_t>(s)], tie_eps);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < ns; ++s)
    backup_state(mdp, v, gamma, static_cast<Index>(s), out[static_cast<std::size_t>(s)],
                 greedy[static_cast<std::size_t>(s)], tie_eps);
}

double bellman_residual(const Mdp& mdp, const std::vector<double>& v, double gamma, Exec exec) {
  std::vector<double> out;
  std::vector<Index> g;
  bellman_sweep(mdp, v, gamma, out, g, exec);
  double r = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) r = std::max(r, std::abs(out[s] - v[s]));
  return r;
}

std::vector<double> evaluate_policy(const Mdp& mdp, const std::vector<Index>& pi,
                                    const PlanOptions& opts, const std::vector<double>* warm) {
  const std::size_t n = mdp.num_states;
  if (n <= opts.dense_limit) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    for (Index s = 0; s < n; ++s) {
      const auto i = static_cast<Eigen::Index>(s);
      r(i) = mdp.r(s, pi[s]);
      for (const auto& t : mdp.row(s, pi[s])) a(i, static_cast<Eigen::Index>(t.state)) -= opts.gamma * t.prob;
    }
    Eigen::VectorXd v = a.partialPivLu().solve(r);
    return {v.data(), v.data() + v.size()};
  }
  // Jacobi iteration driven by the residual of the linear system.
  std::vector<double> v = warm ? *warm : std::vector<double>(n, 0.0);
  std::vector<double> nv(n);
  const auto ns = static_cast<std::int64_t>(n);
  for (std::size_t it = 0; it < 100000; ++it) {
    double res = 0.0;
#pragma omp parallel for schedule(static) reduction(max : res) if (opts.exec == Exec::parallel)
    for (std::int64_t ss = 0; ss < ns; ++ss) {
      const auto s = static_cast<Index>(ss);
      const double x = q_value(mdp, v, opts.gamma, s, pi[s]);
      res = std::max(res, std::abs(x - v[s]));
      nv[s] = x;
    }
    v.swap(nv);
    if (res <= opts.tol) return v;
  }
  throw NonConvergence("iterative policy evaluation did not reach the residual tolerance");
}

PlanResult policy_iteration(const Mdp& mdp, const PlanOptions& opts) {
  if (!(opts.gamma > 0.0 && opts.gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  PlanResult res;
  res.policy.assign(mdp.num_states, 0);
  std::vector<double> backed;
  std::vector<Index> greedy;
  const std::size_t budget = 10 * std::max<std::size_t>(mdp.num_states, 1);
  for (;;) {
    res.values = evaluate_policy(mdp, res.policy, opts, res.values.empty() ? nullptr : &res.values);
    bellman_sweep(mdp, res.values, opts.gamma, backed, greedy, opts.exec, opts.tol);
    bool stable = true;
    for (Index s = 0; s < mdp.num_states; ++s) {
      if (greedy[s] == res.policy[s]) continue;
      res.policy[s] = greedy[s];
      stable = false;
    }
    if (stable) return res;
    if (++res.improvements > budget)
      throw NonConvergence("policy iteration exceeded " + std::to_string(budget) + " improvements");
  }
}

PlanResult value_iteration(const Mdp& mdp, double gamma, double span_tol, Exec exec,
                           std::size_t max_sweeps) {
  PlanResult res;
  res.values.assign(mdp.num_states, 0.0);
  std::vector<double> nv;
  for (std::size_t k = 0; k < max_sweeps; ++k) {
    bellman_sweep(mdp, res.values, gamma, nv, res.policy, exec);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t s = 0; s < nv.size(); ++s) {
      lo = std::min(lo, nv[s] - res.values[s]);
      hi = std::max(hi, nv[s] - res.values[s]);
    }
    res.values.swap(nv);
    ++res.improvements;
    if (hi - lo <= span_tol && std::max(std::abs(hi), std::abs(lo)) <= span_tol / (1.0 - gamma)) return res;
  }
  throw NonConvergence("value iteration did not converge");
}

std::size_t count_bad_rows(const Mdp& mdp, double tol) {
  std::size_t bad = 0;
  for (const auto& row : mdp.next) {
    double s = 0.0;
    for (const auto& t : row) s += t.prob;
    if (std::abs(s - 1.0) > tol) ++bad;
  }
  return bad;
}

}  // namespace ism

#include "ism/consistency.hpp"

#include <atomic>
#include <bit>
#include <cmath>

#include "ism/simplex.hpp"

namespace ism {

EdgeQuery make_query(const GameInstance& g, const Belief& source, const Belief& target,
                     const Observation& o, double lambda) {
  return {source, target, o, lambda, g.alphas(o), g.switching, std::nullopt};
}

std::optional<double> post_distance(const EdgeQuery& q, const Belief& b) {
  if (observation_probability(b, q.alphas) < kZeroProbability) return std::nullopt;
  return tv_distance(shift(condition(b, q.alphas, q.observation), q.switching), q.target);
}

namespace {

void check_dims(const EdgeQuery& q) {
  const std::size_t n = q.source.size();
  if (q.target.size() != n || q.alphas.size() != n || q.switching.size() != n)
    throw std::invalid_argument("edge query: dimension mismatch");
  if (!(q.lambda > 0.0)) throw std::invalid_argument("edge query: lambda must be positive");
  if (n > 20) throw std::invalid_argument("edge query: too many policies for sign enumeration");
}

// coef[i * n + j] is the coefficient of b_i in e_j.
std::vector<double> e_coefficients(const EdgeQuery& q) {
  const std::size_t n = q.source.size();
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c[i * n + j] = q.alphas[i] * (q.switching(i, j) - q.target[j]);
  return c;
}

// LP for one sign pattern (bit j set means s_j = +1). The belief is written
// b = source + u - v with u, v >= 0, so sum(u + v) <= lambda linearizes the
// L1 ball and u = v = 0 is a feasible start whenever the orientation rows
// hold at the source. Returns the problem and the objective's constant term.
std::pair<lp::Problem, double> pattern_lp(const EdgeQuery& q, const std::vector<double>& c,
                                          std::uint64_t pattern) {
  const std::size_t n = q.source.size();
  auto s = [pattern](std::size_t j) { return (pattern >> j) & 1U ? 1.0 : -1.0; };
  std::vector<double> w(n);  // objective coefficient of b_i
  for (std::size_t i = 0; i < n; ++i) {
    double v = -q.lambda * q.alphas[i];
    for (std::size_t j = 0; j < n; ++j) v += s(j) * c[i * n + j];
    w[i] = v;
  }
  lp::Problem p;
  p.num_vars = 2 * n;
  p.objective.assign(2 * n, 0.0);
  double constant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.objective[i] = w[i];
    p.objective[n + i] = -w[i];
    constant += w[i] * q.source[i];
  }
  auto row = [&] { return lp::Row{std::vector<double>(2 * n, 0.0), lp::Sense::le, 0.0}; };

  auto ball = row();
  std::fill(ball.coef.begin(), ball.coef.end(), 1.0);
  ball.rhs = q.lambda;
  p.rows.push_back(std::move(ball));
  // sum(u - v) = 0 as two inequalities, which keeps the origin basic.
  auto up = row(), down = row();
  for (std::size_t i = 0; i < n; ++i) {
    up.coef[i] = 1.0;
    up.coef[n + i] = -1.0;
    down.coef[i] = -1.0;
    down.coef[n + i] = 1.0;
  }
  p.rows.push_back(std::move(up));
  p.rows.push_back(std::move(down));
  const double lo = q.floor.value_or(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto nonneg = row();  // source_i + u_i - v_i >= lo
    nonneg.coef[i] = -1.0;
    nonneg.coef[n + i] = 1.0;
    nonneg.rhs = q.source[i] - lo;
    p.rows.push_back(std::move(nonneg));
  }
  for (std::size_t j = 0; j < n; ++j) {
    auto orient = row();  // s_j e_j(b) >= 0
    double at_source = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      orient.coef[i] = -s(j) * c[i * n + j];
      orient.coef[n + i] = s(j) * c[i * n + j];
      at_source += s(j) * c[i * n + j] * q.source[i];
    }
    orient.rhs = at_source;
    p.rows.push_back(std::move(orient));
  }
  return {std::move(p), constant};
}

std::uint64_t greedy_pattern(const EdgeQuery& q, const std::vector<double>& c) {
  const std::size_t n = q.source.size();
  std::uint64_t g = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += c[i * n + j] * q.source[i];
    if (e >= 0.0) g |= std::uint64_t{1} << j;
  }
  return g;
}

Refutation validate_witness(const EdgeQuery& q, const lp::Solution& sol, double value) {
  const std::size_t n = q.source.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::max(0.0, q.source[i] + sol.x[i] - sol.x[n + i]);
  Refutation r{Belief(std::move(w)), 0.0, 0.0, value};
  r.pre_distance = tv_distance(r.witness, q.source);
  auto post = post_distance(q, r.witness);
  if (!post || r.pre_distance > q.lambda + 1e-9 || *post <= q.lambda - 1e-9)
    throw LpFailure("LP optimum " + std::to_string(value) +
                    " does not re-validate as a refutation");
  r.post_distance = *post;
  return r;
}

enum class Outcome : std::uint8_t { pending, clear, refuted, failed };

}  // namespace

Verdict check_edge(const EdgeQuery& q, Exec exec) {
  check_dims(q);
  const std::size_t n = q.source.size();
  const auto c = e_coefficients(q);
  const std::uint64_t g = greedy_pattern(q, c);
  const std::uint64_t total = std::uint64_t{1} << n;

  Verdict v;
  if (exec == Exec::serial || total < 4) {
    for (std::uint64_t k = 0; k < total; ++k) {
      const auto [prob, constant] = pattern_lp(q, c, g ^ k);
      const auto sol = lp::maximize(prob);
      ++v.lps_solved;
      if (sol.status == lp::Status::infeasible) continue;
      if (sol.status != lp::Status::optimal)
        throw LpFailure("simplex did not reach an optimum for sign pattern " + std::to_string(k));
      if (sol.value + constant > kStrictMargin) {
        v.refutation = validate_witness(q, sol, sol.value + constant);
        return v;
      }
    }
    return v;
  }

  // Parallel: the lowest visitation index with a positive optimum wins, so the
  // verdict matches the serial scan.
  std::vector<Outcome> outcome(total, Outcome::pending);
  std::vector<lp::Solution> sols(total);
  std::vector<double> values(total, 0.0);
  std::atomic<std::uint64_t> first_hit{total};
  std::atomic<std::size_t> solved{0};
  const auto last = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t kk = 0; kk < last; ++kk) {
    const auto k = static_cast<std::uint64_t>(kk);
    if (k > first_hit.load(std::memory_order_relaxed)) continue;
    const auto [prob, constant] = pattern_lp(q, c, g ^ k);
    auto sol = lp::maximize(prob);
    solved.fetch_add(1, std::memory_order_relaxed);
    Outcome o = Outcome::clear;
    values[k] = sol.value + constant;
    if (sol.status == lp::Status::optimal) {
      if (values[k] > kStrictMargin) o = Outcome::refuted;
    } else if (sol.status != lp::Status::infeasible) {
      o = Outcome::failed;
    }
    if (o == Outcome::refuted || o == Outcome::failed) {
      std::uint64_t cur = first_hit.load();
      while (k < cur && !first_hit.compare_exchange_weak(cur, k)) {
      }
    }
    outcome[k] = o;
    sols[k] = std::move(sol);
  }
  v.lps_solved = solved.load();
  const std::uint64_t k = first_hit.load();
  if (k == total) return v;
  if (outcome[k] == Outcome::failed)
    throw LpFailure("simplex did not reach an optimum for sign pattern " + std::to_string(k));
  v.refutation = validate_witness(q, sols[k], values[k]);
  return v;
}

EdgeChecker::EdgeChecker(const GameInstance& g, double lambda, std::optional<double> floor,
                         Exec exec)
    : game_(g), lambda_(lambda), floor_(floor), exec_(exec) {}

EdgeChecker::Key EdgeChecker::key(const Belief& a, const Belief& b, const Observation& o) const {
  Key k;
  k.reserve(a.size() + b.size() + 2);
  for (double x : a.values()) k.push_back(std::llround(x * 1e12));
  for (double x : b.values()) k.push_back(std::llround(x * 1e12));
  k.push_back(static_cast<std::int64_t>(o.state));
  k.push_back(static_cast<std::int64_t>(o.action));
  return k;
}

Verdict EdgeChecker::check(const Belief& source, const Belief& target, const Observation& o) {
  const Key k = key(source, target, o);
  {
    std::lock_guard lock(mu_);
    ++queries_;
    if (auto it = cache_.find(k); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  EdgeQuery q = make_query(game_, source, target, o, lambda_);
  q.floor = floor_;
  Verdict v = check_edge(q, exec_);
  std::lock_guard lock(mu_);
  cache_.emplace(k, v);
  return v;
}

std::size_t EdgeChecker::queries() const {
  std::lock_guard lock(mu_);
  return queries_;
}

std::size_t EdgeChecker::cache_hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

}  // namespace ism

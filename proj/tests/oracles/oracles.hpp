#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numeric kernels; inputs are plain vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
/// Row-major n x n matrix.
using Mat = std::vector<double>;

inline double l1(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

/// Bayes step followed by the switch mix, computed directly from the
/// definitions. Returns nullopt when the observation has zero probability.
inline std::optional<Vec> tau(const Vec& b, const Vec& alpha, const Mat& t) {
  const std::size_t n = b.size();
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) z += alpha[i] * b[i];
  if (z <= 1e-12) return std::nullopt;
  Vec out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out[j] += alpha[i] * b[i] / z * t[i * n + j];
  return out;
}

/// Largest tv(tau(b), target) over grid points b of the simplex with
/// ||b - source||_1 <= lambda. Grid step is `res`; n must be 2 or 3.
struct GridResult {
  double max_post = -1.0;
  Vec argmax;
  std::size_t points = 0;
};

inline GridResult grid_search(const Vec& source, const Vec& target, const Vec& alpha, const Mat& t,
                              double lambda, double res) {
  GridResult g;
  const std::size_t n = source.size();
  const long k = std::lround(1.0 / res);
  auto visit = [&](const Vec& b) {
    if (l1(b, source) > lambda + 1e-12) return;
    ++g.points;
    auto post = tau(b, alpha, t);
    if (!post) return;
    const double d = l1(*post, target);
    if (d > g.max_post) {
      g.max_post = d;
      g.argmax = b;
    }
  };
  if (n == 2) {
    for (long i = 0; i <= k; ++i) visit({double(i) / k, double(k - i) / k});
  } else {
    for (long i = 0; i <= k; ++i)
      for (long j = 0; i + j <= k; ++j) visit({double(i) / k, double(j) / k, double(k - i - j) / k});
  }
  return g;
}

/// Dense MDP: p[(s * A + a) * S + s'], r[s * A + a].
struct DenseMdp {
  std::size_t states = 0, actions = 0;
  Vec p, r;
};

/// Plain value iteration until the update span drops below span_tol, then
/// the value is recentred using the span bounds.
inline Vec value_iteration(const DenseMdp& m, double gamma, double span_tol) {
  const std::size_t S = m.states, A = m.actions;
  Vec v(S, 0.0), w(S);
  for (int it = 0; it < 10000000; ++it) {
    for (std::size_t s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        double q = m.r[s * A + a];
        for (std::size_t s2 = 0; s2 < S; ++s2) q += gamma * m.p[(s * A + a) * S + s2] * v[s2];
        best = std::max(best, q);
      }
      w[s] = best;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t s = 0; s < S; ++s) {
      lo = std::min(lo, w[s] - v[s]);
      hi = std::max(hi, w[s] - v[s]);
    }
    v.swap(w);
    if (hi - lo <= span_tol) {
      // MacQueen bounds: v* lies in [v + gamma lo/(1-gamma), v + gamma hi/(1-gamma)].
      const double mid = gamma * (lo + hi) / (2.0 * (1.0 - gamma));
      for (double& x : v) x += mid;
      return v;
    }
  }
  return v;
}

}  // namespace oracle

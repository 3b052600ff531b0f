#include <Eigen/Dense>
#include <atomic>
#include <cmath>

#include "ism/consistency.hpp"
#include "ism/random.hpp"

namespace ism {

namespace {

// Half-space a.b <= r in b-space.
struct HalfSpace {
  std::vector<double> a;
  double r;
};

std::vector<HalfSpace> polytope_faces(const Belief& src, double lambda) {
  const std::size_t n = src.size();
  std::vector<HalfSpace> h;
  for (std::size_t i = 0; i < n; ++i) {
    HalfSpace f{std::vector<double>(n, 0.0), 0.0};
    f.a[i] = -1.0;
    h.push_back(std::move(f));
  }
  // ||b - src||_1 <= lambda as 2^n half-spaces s.(b - src) <= lambda.
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << n); ++p) {
    HalfSpace f{std::vector<double>(n), lambda};
    for (std::size_t i = 0; i < n; ++i) {
      f.a[i] = (p >> i) & 1U ? 1.0 : -1.0;
      f.r += f.a[i] * src[i];
    }
    h.push_back(std::move(f));
  }
  return h;
}

bool violates(const EdgeQuery& q, const Belief& b) {
  if (tv_distance(b, q.source) > q.lambda + 1e-9) return false;
  if (q.floor)
    for (double x : b.values())
      if (x < *q.floor - 1e-12) return false;
  auto post = post_distance(q, b);
  return post && *post > q.lambda;
}

}  // namespace

std::vector<Belief> feasible_vertices(const Belief& src, double lambda) {
  const std::size_t n = src.size();
  if (n > 6) throw std::invalid_argument("feasible_vertices: n too large");
  if (n == 1) return {src};
  const auto faces = polytope_faces(src, lambda);
  const std::size_t m = faces.size(), k = n - 1;
  std::vector<Belief> out;

  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd r(n);
    a.row(0).setOnes();
    r(0) = 1.0;
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(t + 1), static_cast<Eigen::Index>(i)) = faces[pick[t]].a[i];
      r(static_cast<Eigen::Index>(t + 1)) = faces[pick[t]].r;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() == static_cast<Eigen::Index>(n)) {
      Eigen::VectorXd x = lu.solve(r);
      bool ok = true;
      for (const auto& f : faces) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += f.a[i] * x(static_cast<Eigen::Index>(i));
        if (v > f.r + 1e-9) {
          ok = false;
          break;
        }
      }
      if (ok) {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = std::max(0.0, x(static_cast<Eigen::Index>(i)));
        Belief b(std::move(w));
        bool dup = false;
        for (const auto& e : out)
          if (tv_distance(e, b) < 1e-9) {
            dup = true;
            break;
          }
        if (!dup) out.push_back(std::move(b));
      }
    }
    // Next k-combination of m faces.
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

std::optional<Belief> brute_force_refute(const EdgeQuery& q, std::size_t samples,
                                         std::uint64_t seed, Exec exec) {
  const std::size_t n = q.source.size();
  if (n <= 4)
    for (const auto& v : feasible_vertices(q.source, q.lambda))
      if (violates(q, v)) return v;

  auto proposal = [&](std::size_t k) {
    Rng rng = make_stream(seed, k);
    auto d = sample_simplex(n, rng);
    const double dist = tv_distance(d, q.source.values());
    if (dist > q.lambda) {
      const double f = q.lambda / dist;
      for (std::size_t i = 0; i < n; ++i) d[i] = q.source[i] + f * (d[i] - q.source[i]);
    }
    for (auto& x : d) x = std::max(0.0, x);
    return Belief(std::move(d));
  };

  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < samples; ++k)
      if (auto b = proposal(k); violates(q, b)) return b;
    return std::nullopt;
  }
  std::atomic<std::size_t> first{samples};
  const auto last = static_cast<std::int64_t>(samples);
#pragma omp parallel for schedule(static)
  for (std::int64_t kk = 0; kk < last; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    if (k > first.load(std::memory_order_relaxed)) continue;
    if (violates(q, proposal(k))) {
      std::size_t cur = first.load();
      while (k < cur && !first.compare_exchange_weak(cur, k)) {
      }
    }
  }
  if (first.load() == samples) return std::nullopt;
  return proposal(first.load());
}

}  // namespace ism

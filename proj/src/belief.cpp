#include "ism/belief.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ism {

namespace {

std::vector<double> normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw std::invalid_argument("belief weights must be nonnegative");
    sum += x;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("belief weights sum to zero");
  for (auto& x : w) x /= sum;
  return w;
}

}  // namespace

Belief::Belief(std::vector<double> weights) : p_(normalized(std::move(weights))) {}

Belief Belief::exact(std::vector<double> entries) {
  double sum = 0.0;
  for (double x : entries) {
    if (!(x >= 0.0)) throw std::invalid_argument("belief entries must be nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbTolerance) throw std::invalid_argument("belief entries must sum to 1");
  Belief b;
  b.p_ = std::move(entries);
  return b;
}

ZeroProbabilityObservation::ZeroProbabilityObservation(const Observation& o, std::size_t idx)
    : std::runtime_error("observation (" + std::to_string(o.state) + ", " +
                         std::to_string(o.action) + ") has zero probability at index " +
                         std::to_string(idx)),
      observation(o),
      index(idx) {}

Belief uniform_belief(std::size_t n) {
  if (n < 1) throw std::domain_error("uniform_belief: n must be at least 1");
  return Belief(std::vector<double>(n, 1.0));
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("tv_distance: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

double observation_probability(const Belief& b, std::span<const double> alphas) {
  if (alphas.size() != b.size()) throw std::invalid_argument("alpha length mismatch");
  double z = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) z += alphas[i] * b[i];
  return z;
}

std::vector<double> action_distribution(const Belief& b, Index s, const GameInstance& g) {
  std::vector<double> d(g.arena.num_p2_actions(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto row = g.policies[i].at(s);
    for (std::size_t a = 0; a < d.size(); ++a) d[a] += b[i] * row[a];
  }
  return d;
}

Belief condition(const Belief& b, std::span<const double> alphas, const Observation& o) {
  const double z = observation_probability(b, alphas);
  if (z < kZeroProbability) throw ZeroProbabilityObservation(o, 0);
  std::vector<double> w(b.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = alphas[i] * b[i] / z;
  return Belief(std::move(w));
}

Belief condition(const Belief& b, const Observation& o, const GameInstance& g) {
  return condition(b, g.alphas(o), o);
}

Belief shift(const Belief& b, const SwitchModel& t) {
  if (t.size() != b.size()) throw std::invalid_argument("shift: dimension mismatch");
  const std::size_t n = b.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double bj = b[j];
    if (bj == 0.0) continue;
    auto row = t.row(j);
    for (std::size_t i = 0; i < n; ++i) w[i] += bj * row[i];
  }
  return Belief(std::move(w));
}

Belief transform(const Belief& b, const Observation& o, const GameInstance& g) {
  return shift(condition(b, o, g), g.switching);
}

Belief transform(const Belief& b, const Observation& o, const GameInstance& g,
                 const SwitchModel& t) {
  return shift(condition(b, o, g), t);
}

Belief transform_seq(const Belief& b, std::span<const Observation> seq, const GameInstance& g) {
  Belief cur = b;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    try {
      cur = transform(cur, seq[k], g);
    } catch (const ZeroProbabilityObservation&) {
      throw ZeroProbabilityObservation(seq[k], k);
    }
  }
  return cur;
}

}  // namespace ism

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "ism/game.hpp"

namespace ism {

/// Denominators of the conditioning step below this are treated as zero.
inline constexpr double kZeroProbability = 1e-12;

/// Probability distribution over the n opponent policies, kept renormalized.
class Belief {
 public:
  Belief() = default;
  /// Takes nonnegative weights and renormalizes them.
  explicit Belief(std::vector<double> weights);
  /// Keeps the entries bit-for-bit; they must already sum to 1 within 1e-9.
  static Belief exact(std::vector<double> entries);

  std::size_t size() const { return p_.size(); }
  double operator[](Index i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }
  const std::vector<double>& vec() const { return p_; }

  bool operator==(const Belief&) const = default;

 private:
  std::vector<double> p_;
};

class ZeroProbabilityObservation : public std::runtime_error {
 public:
  ZeroProbabilityObservation(const Observation& o, std::size_t index);
  Observation observation;
  /// Position within the sequence for transform_seq; 0 for single steps.
  std::size_t index;
};

Belief uniform_belief(std::size_t n);

/// Unhalved L1 distance.
double tv_distance(std::span<const double> a, std::span<const double> b);
inline double tv_distance(const Belief& a, const Belief& b) {
  return tv_distance(a.values(), b.values());
}

/// P(o | b) = sum_i b_i alpha_i.
double observation_probability(const Belief& b, std::span<const double> alphas);
/// P(a2 | b) at game state s for every a2.
std::vector<double> action_distribution(const Belief& b, Index s, const GameInstance& g);

Belief condition(const Belief& b, std::span<const double> alphas, const Observation& o = {});
Belief condition(const Belief& b, const Observation& o, const GameInstance& g);
Belief shift(const Belief& b, const SwitchModel& t);
Belief transform(const Belief& b, const Observation& o, const GameInstance& g);
/// transform with an explicit switch matrix instead of the instance's.
Belief transform(const Belief& b, const Observation& o, const GameInstance& g,
                 const SwitchModel& t);
Belief transform_seq(const Belief& b, std::span<const Observation> seq, const GameInstance& g);

}  // namespace ism

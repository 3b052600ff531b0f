#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ism/belief.hpp"
#include "ism/exec.hpp"
#include "ism/game.hpp"

namespace ism {

/// Strict inequalities of the edge formula hold when the LP optimum exceeds this.
inline constexpr double kStrictMargin = 1e-9;

/// A candidate ISM edge b(m) --o--> b(m') together with lambda.
struct EdgeQuery {
  Belief source;
  Belief target;
  Observation observation;
  double lambda = 0.0;
  std::vector<double> alphas;
  SwitchModel switching;
  /// Optional lower bound on every entry of b (restricts the search to b >= floor).
  std::optional<double> floor;
};

EdgeQuery make_query(const GameInstance& g, const Belief& source, const Belief& target,
                     const Observation& o, double lambda);

struct Refutation {
  Belief witness;
  double pre_distance = 0.0;
  double post_distance = 0.0;
  double objective = 0.0;
};

struct Verdict {
  std::optional<Refutation> refutation;
  std::size_t lps_solved = 0;
  bool consistent() const { return !refutation.has_value(); }
};

class LpFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// tv(tau(b), target) for the query's observation and switch matrix.
/// Returns nullopt when P(o | b) is below the zero threshold.
std::optional<double> post_distance(const EdgeQuery& q, const Belief& b);

/// Decides edge consistency by one LP per sign pattern. The parallel
/// version returns the same verdict and witness as the serial one.
Verdict check_edge(const EdgeQuery& q, Exec exec = Exec::parallel);
inline Verdict check_edge_serial(const EdgeQuery& q) { return check_edge(q, Exec::serial); }

/// Vertices of {b in simplex : ||b - source||_1 <= lambda}. Requires n <= 6.
std::vector<Belief> feasible_vertices(const Belief& source, double lambda);

/// Randomized search for a violating belief. Proposals are Dirichlet draws
/// pulled into the lambda-ball; for n <= 4 the polytope vertices are tried
/// first. A nullopt result does not prove consistency.
std::optional<Belief> brute_force_refute(const EdgeQuery& q, std::size_t samples,
                                         std::uint64_t seed, Exec exec = Exec::parallel);

/// Memoizing wrapper bound to one instance and lambda. Thread-safe.
class EdgeChecker {
 public:
  EdgeChecker(const GameInstance& g, double lambda, std::optional<double> floor = std::nullopt,
              Exec exec = Exec::parallel);

  Verdict check(const Belief& source, const Belief& target, const Observation& o);

  std::size_t queries() const;
  std::size_t cache_hits() const;

 private:
  using Key = std::vector<std::int64_t>;
  Key key(const Belief& a, const Belief& b, const Observation& o) const;

  const GameInstance& game_;
  double lambda_;
  std::optional<double> floor_;
  Exec exec_;
  mutable std::mutex mu_;
  std::map<Key, Verdict> cache_;
  std::size_t queries_ = 0, hits_ = 0;
};

}  // namespace ism

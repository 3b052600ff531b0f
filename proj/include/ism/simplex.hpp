#pragma once

#include <cstddef>
#include <vector>

namespace ism::lp {

enum class Sense { le, ge, eq };

struct Row {
  std::vector<double> coef;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

/// maximize objective . x subject to rows, x >= 0.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Row> rows;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
  Status status = Status::infeasible;
  double value = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

/// Dense two-phase primal simplex with Bland's anti-cycling rule.
Solution maximize(const Problem& problem, std::size_t max_pivots = 100000);

}  // namespace ism::lp

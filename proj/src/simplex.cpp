#include "ism/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ism::lp {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-11;
constexpr double kFeasEps = 1e-9;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_(rows * (cols + 1), 0.0), obj_(cols + 1, 0.0), basis_(rows) {}

  double& at(std::size_t i, std::size_t j) { return a_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  std::vector<double>& obj() { return obj_; }
  std::vector<std::size_t>& basis() { return basis_; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  // Reduced costs for cost vector c given the current basis.
  void price(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= n_; ++j) obj_[j] = j < n_ ? c[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= cb * at(i, j);
    }
  }

  void pivot(std::size_t r, std::size_t col) {
    const double p = at(r, col);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    at(r, col) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, col) = 0.0;
    }
    const double f = obj_[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= f * at(r, j);
      obj_[col] = 0.0;
    }
    basis_[r] = col;
  }

  // Bland-rule iterations over columns [0, limit).
  Status run(std::size_t limit, std::size_t max_pivots, std::size_t& pivots) {
    while (true) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j)
        if (obj_[j] > kCostEps) {
          enter = j;
          break;
        }
      if (enter == limit) return Status::optimal;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double v = at(i, enter);
        if (v <= kPivotEps) continue;
        const double ratio = rhs(i) / v;
        if (ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == m_) return Status::unbounded;
      if (++pivots > max_pivots) return Status::iteration_limit;
      pivot(leave, enter);
    }
  }

  // Drops row r (an artificial stuck at zero on a redundant constraint).
  void drop_row(std::size_t r) {
    for (std::size_t i = r + 1; i < m_; ++i)
      for (std::size_t j = 0; j <= n_; ++j) at(i - 1, j) = at(i, j);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
  }

 private:
  std::size_t m_, n_;
  std::vector<double> a_;
  std::vector<double> obj_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution maximize(const Problem& prob, std::size_t max_pivots) {
  const std::size_t nv = prob.num_vars;
  if (prob.objective.size() != nv) throw std::invalid_argument("lp: objective length mismatch");
  const std::size_t m = prob.rows.size();

  // Column layout: structural | slack/surplus per inequality | artificial.
  std::size_t n_slack = 0, n_art = 0;
  std::vector<Sense> sense(m);
  std::vector<double> sign(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = prob.rows[i];
    if (r.coef.size() != nv) throw std::invalid_argument("lp: row length mismatch");
    sense[i] = r.sense;
    if (r.rhs < 0.0) {
      sign[i] = -1.0;
      if (r.sense == Sense::le) sense[i] = Sense::ge;
      else if (r.sense == Sense::ge) sense[i] = Sense::le;
    }
    if (sense[i] != Sense::eq) ++n_slack;
    if (sense[i] != Sense::le) ++n_art;
  }
  const std::size_t art0 = nv + n_slack;
  const std::size_t ncols = art0 + n_art;
  Tableau t(m, ncols);
  std::size_t si = nv, ai = art0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = prob.rows[i];
    for (std::size_t j = 0; j < nv; ++j) t.at(i, j) = sign[i] * r.coef[j];
    t.rhs(i) = sign[i] * r.rhs;
    if (sense[i] == Sense::le) {
      t.at(i, si) = 1.0;
      t.basis()[i] = si++;
    } else {
      if (sense[i] == Sense::ge) t.at(i, si++) = -1.0;
      t.at(i, ai) = 1.0;
      t.basis()[i] = ai++;
    }
  }

  Solution sol;
  if (n_art > 0) {
    std::vector<double> c1(ncols, 0.0);
    for (std::size_t j = art0; j < ncols; ++j) c1[j] = -1.0;
    t.price(c1);
    const Status st = t.run(ncols, max_pivots, sol.pivots);
    if (st == Status::iteration_limit) {
      sol.status = st;
      return sol;
    }
    // obj[ncols] holds minus the phase-1 objective value.
    if (-t.obj()[ncols] < -kFeasEps) {
      sol.status = Status::infeasible;
      return sol;
    }
    // Pivot remaining artificials out of the basis or drop their rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (t.basis()[i] < art0) {
        ++i;
        continue;
      }
      std::size_t col = art0;
      for (std::size_t j = 0; j < art0; ++j)
        if (std::abs(t.at(i, j)) > 1e-9) {
          col = j;
          break;
        }
      if (col == art0) {
        t.drop_row(i);
      } else {
        t.pivot(i, col);
        ++i;
      }
    }
  }

  std::vector<double> c2(ncols, 0.0);
  for (std::size_t j = 0; j < nv; ++j) c2[j] = prob.objective[j];
  t.price(c2);
  sol.status = t.run(art0, max_pivots, sol.pivots);
  if (sol.status != Status::optimal) return sol;
  sol.x.assign(nv, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (t.basis()[i] < nv) sol.x[t.basis()[i]] = std::max(0.0, t.rhs(i));
  sol.value = 0.0;
  for (std::size_t j = 0; j < nv; ++j) sol.value += prob.objective[j] * sol.x[j];
  return sol;
}

}  // namespace ism::lp

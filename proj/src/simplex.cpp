#include "cvx/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvx/errors.hpp"

namespace cvx {

LinearProgram LinearProgram::with_variables(Eigen::Index n) {
  LinearProgram lp;
  lp.cost = Eigen::VectorXd::Zero(n);
  lp.ineq = Eigen::MatrixXd(0, n);
  lp.ineq_rhs = Eigen::VectorXd(0);
  lp.eq = Eigen::MatrixXd(0, n);
  lp.eq_rhs = Eigen::VectorXd(0);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Zero(n);
  return lp;
}

namespace {

using Eigen::Index;

class Tableau {
 public:
  Tableau(Index rows, Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  double& at(Index i, Index j) { return t_(i, j); }
  double rhs(Index i) const { return t_(i, cols()); }
  double& rhs(Index i) { return t_(i, cols()); }
  double reduced(Index j) const { return t_(rows(), j); }
  double objective() const { return -t_(rows(), cols()); }
  std::vector<Index>& basis() { return basis_; }

  auto objective_row() { return t_.row(rows()); }
  auto row(Index i) { return t_.row(i); }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double factor = t_(i, c);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Bland's rule over columns [0, allowed).
  void optimize(Index allowed, const SimplexOptions& opt, int& iterations) {
    for (;;) {
      Index entering = -1;
      for (Index j = 0; j < allowed; ++j) {
        if (reduced(j) < -opt.pivot_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return;
      Index leaving = -1;
      double best = 0.0;
      for (Index i = 0; i < rows(); ++i) {
        const double a = t_(i, entering);
        if (a <= opt.pivot_tol) continue;
        const double ratio = std::max(rhs(i), 0.0) / a;
        if (leaving < 0 || ratio < best - 1e-12 * (1.0 + std::abs(best)) ||
            (std::abs(ratio - best) <= 1e-12 * (1.0 + std::abs(best)) &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
          leaving = i;
          best = ratio;
        }
      }
      if (leaving < 0) throw std::logic_error("simplex: unbounded direction in a boxed program");
      pivot(leaving, entering);
      if (++iterations > opt.max_iterations) throw Error("simplex: iteration limit reached");
    }
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Index> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt) {
  const Index n = lp.variables();
  require_dims(n, lp.lower.size(), "solve_lp lower");
  require_dims(n, lp.upper.size(), "solve_lp upper");
  require_dims(n, lp.ineq.cols(), "solve_lp ineq");
  require_dims(n, lp.eq.cols(), "solve_lp eq");
  require_dims(lp.ineq.rows(), lp.ineq_rhs.size(), "solve_lp ineq_rhs");
  require_dims(lp.eq.rows(), lp.eq_rhs.size(), "solve_lp eq_rhs");
  if (!lp.lower.allFinite() || !lp.upper.allFinite()) throw PreconditionViolation("solve_lp: bounds must be finite");

  LpSolution sol;
  if ((lp.lower.array() > lp.upper.array()).any()) return sol;

  const Index m1 = lp.ineq.rows();
  const Index m2 = lp.eq.rows();
  const Index m = m1 + n + m2;
  const Index ineq_slack0 = n;
  const Index bound_slack0 = n + m1;
  const Index art0 = n + m1 + n;
  Tableau T(m, art0 + m);

  // y = z - lower >= 0
  const Eigen::VectorXd ineq_rhs = lp.ineq_rhs - lp.ineq * lp.lower;
  const Eigen::VectorXd eq_rhs = lp.eq_rhs - lp.eq * lp.lower;
  double scale = 1.0;
  std::vector<bool> artificial(static_cast<std::size_t>(m), false);

  auto place = [&](Index i, double b, Index slack) {
    if (b < 0.0) {
      T.row(i) *= -1.0;
      b = -b;
    }
    T.rhs(i) = b;
    scale = std::max(scale, b);
    if (slack >= 0 && T.at(i, slack) > 0.0) {
      T.basis()[static_cast<std::size_t>(i)] = slack;
    } else {
      T.at(i, art0 + i) = 1.0;
      T.basis()[static_cast<std::size_t>(i)] = art0 + i;
      artificial[static_cast<std::size_t>(i)] = true;
    }
  };

  for (Index i = 0; i < m1; ++i) {
    for (Index j = 0; j < n; ++j) T.at(i, j) = lp.ineq(i, j);
    T.at(i, ineq_slack0 + i) = 1.0;
    place(i, ineq_rhs(i), ineq_slack0 + i);
  }
  for (Index j = 0; j < n; ++j) {
    const Index i = m1 + j;
    T.at(i, j) = 1.0;
    T.at(i, bound_slack0 + j) = 1.0;
    place(i, lp.upper(j) - lp.lower(j), bound_slack0 + j);
  }
  for (Index i = 0; i < m2; ++i) {
    const Index r = m1 + n + i;
    for (Index j = 0; j < n; ++j) T.at(r, j) = lp.eq(i, j);
    place(r, eq_rhs(i), -1);
  }

  // Phase 1: minimize the sum of artificials.
  auto obj = T.objective_row();
  obj.setZero();
  for (Index i = 0; i < m; ++i) {
    if (!artificial[static_cast<std::size_t>(i)]) continue;
    obj -= T.row(i);
    obj(art0 + i) += 1.0;
  }
  T.optimize(art0, opt, sol.iterations);
  if (T.objective() > opt.feasibility_tol * scale) return sol;

  // Drive zero-level artificials out of the basis; rows where that is
  // impossible are redundant and stay inert.
  for (Index i = 0; i < m; ++i) {
    if (T.basis()[static_cast<std::size_t>(i)] < art0) continue;
    for (Index j = 0; j < art0; ++j) {
      if (std::abs(T.at(i, j)) > opt.pivot_tol) {
        T.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2.
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(art0 + m);
  cost.head(n) = lp.cost;
  obj.setZero();
  obj.head(art0 + m) = cost.transpose();
  for (Index i = 0; i < m; ++i) {
    const Index b = T.basis()[static_cast<std::size_t>(i)];
    if (cost(b) != 0.0) obj -= cost(b) * T.row(i);
  }
  T.optimize(art0, opt, sol.iterations);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < m; ++i) {
    const Index b = T.basis()[static_cast<std::size_t>(i)];
    if (b < n) y(b) = std::max(T.rhs(i), 0.0);
  }
  sol.z = (lp.lower + y).cwiseMin(lp.upper);
  sol.objective = lp.cost.dot(sol.z);
  sol.status = LpStatus::optimal;
  return sol;
}

}  // namespace cvx

#pragma once

// Dense two-phase tableau simplex with Bland's anti-cycling rule.
//
//   minimize    cost . z
//   subject to  ineq * z <= ineq_rhs
//               eq * z    = eq_rhs
//               lower <= z <= upper      (all bounds finite)
//
// Because every variable is boxed the problem is never unbounded; the only
// outcomes are an optimal vertex or infeasibility.

#include <Eigen/Dense>

namespace cvx {

struct LinearProgram {
  Eigen::VectorXd cost;
  Eigen::MatrixXd ineq;
  Eigen::VectorXd ineq_rhs;
  Eigen::MatrixXd eq;
  Eigen::VectorXd eq_rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Empty constraint blocks sized for n variables and zero bounds.
  static LinearProgram with_variables(Eigen::Index n);
  Eigen::Index variables() const { return cost.size(); }
};

enum class LpStatus { optimal, infeasible };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd z;
  double objective = 0.0;
  int iterations = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-8;
  int max_iterations = 100000;
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace cvx

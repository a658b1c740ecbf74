#pragma once

// Marginal functions h(x) = min { f(r) : S^T r = x } on Im(S^T).
//
// S is d x n, so f lives on R^d and x on R^n. The equality constraint is
// reduced to U^T S^T r = U^T x with U an orthonormal basis of Im(S^T), which
// has full row rank. Max-affine objectives (and sums of them) go through an
// epigraph LP over a bounding box; quadratic objectives (and sums of them)
// through the equality-constrained KKT system.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "cvx/convex_function.hpp"
#include "cvx/linalg.hpp"
#include "cvx/report.hpp"
#include "cvx/simplex.hpp"
#include "cvx/tolerances.hpp"

namespace cvx {

class MarginalFunction {
 public:
  MarginalFunction(ConvexFunction<double> f, Mat S, double rank_tol = 1e-10);

  const ConvexFunction<double>& f() const { return f_; }
  const Mat& S() const { return S_; }
  /// Im(S^T) inside R^n.
  const Subspace<double>& domain() const { return domain_; }
  /// U^T S^T: the reduced, full-row-rank constraint matrix.
  const Mat& constraint() const { return constraint_; }

  Index x_dim() const { return S_.cols(); }
  Index r_dim() const { return S_.rows(); }
  Index fiber_dim() const { return r_dim() - domain_.dim(); }

 private:
  ConvexFunction<double> f_;
  Mat S_;
  Subspace<double> domain_;
  Mat constraint_;
};

enum class WitnessStatus { exact_lp, exact_kkt };

struct MinimizationWitness {
  double value = 0.0;
  Vec argmin;
  WitnessStatus status = WitnessStatus::exact_lp;
  /// The LP optimum touched the bounding box (the minimum was still
  /// confirmed on a box twice as large).
  bool box_active = false;
};

const char* to_string(WitnessStatus s);

struct MarginalOptions {
  double box_radius = 1e3;
  double domain_tol = 1e-8;
  double singular_tol = 1e-10;
  SimplexOptions simplex;
};

/// Throws DomainViolation, UnboundedBelow, SingularKKT or UnsupportedFamily.
MinimizationWitness marginal_value(const MarginalFunction& h, const Vec& x, const MarginalOptions& options = {});

/// (h(x) + h(y)) / 2 - h((x + y) / 2)
double midpoint_convexity_gap(const MarginalFunction& h, const Vec& x, const Vec& y,
                              const MarginalOptions& options = {});

/// True when f is a quadratic (or a sum of quadratics) with positive definite Q.
bool strictly_convex(const ConvexFunction<double>& f, double floor = 1e-10);

struct StrictnessReport {
  bool pass = false;
  double min_gap = 0.0;
  std::size_t witness_index = 0;
  double threshold = 0.0;
};

/// Requires strictly convex f (else NotStrictlyConvex) and ||x - y|| >= 1e-3
/// for every pair (else PreconditionViolation). The threshold is
/// tol * (1 + max |h|) over the evaluated points.
StrictnessReport strict_convexity_certificate(const MarginalFunction& h, const std::vector<std::pair<Vec, Vec>>& pairs,
                                              double tol = 1e-10, const MarginalOptions& options = {});

/// Hessian of h for quadratic f, in the coordinates of domain().basis. Read
/// off the inverse of the KKT matrix [2Q C^T; C 0]. Throws SingularKKT.
Mat marginal_hessian(const MarginalFunction& h);

using MarginalSolver = std::function<MinimizationWitness(const MarginalFunction&, const Vec&)>;

struct Lemma2Options {
  int pairs = 20;
  double sample_radius = 1.0;
  std::uint64_t seed = 0;
  Tolerances tol;
  MarginalOptions marginal;
  /// Replaces marginal_value; used by mutation fixtures.
  MarginalSolver solver;
  bool oracle = false;
  double oracle_pitch = 1e-2;
  double oracle_radius = 5.0;
  double oracle_tol = 1e-2;
};

/// Samples x = S^T r for seeded r and verifies, over `pairs` pairs:
///   lemma2.witness     - ||S^T argmin - x|| and |f(argmin) - value| (gap = worst residual)
///   lemma2.convexity   - midpoint gaps >= -tol.marginal_gap (gap = min gap)
///   lemma2.strictness  - PD quadratic only: gaps >= tol.strict_gap where ||x - y|| >= 1e-3
///   lemma2.hessian_psd - quadratic only: closed-form Hessian eigenvalue floor
///   lemma2.closed_form - quadratic only: gap equals (y1-y2)^T H (y1-y2) / 8
///   lemma2.oracle      - optional: value matches the brute-force grid
/// Midpoint sampling is a sampled surrogate for convexity, not a proof.
TrialRecord lemma2_check(const ConvexFunction<double>& f, const Mat& S, const Lemma2Options& options);

}  // namespace cvx

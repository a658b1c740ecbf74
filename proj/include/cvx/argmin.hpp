#pragma once

// Minimization over box-bounded polyhedra and the geometry of the argmin set
// M = {x in C : f(x) = m}. M is never enumerated; it is represented by the
// membership predicate f(x) <= m + tol on C.

#include <cstdint>
#include <string>

#include "cvx/convex_function.hpp"
#include "cvx/linalg.hpp"
#include "cvx/report.hpp"

namespace cvx {

/// {x : G x <= h, |x_j| <= box_radius}. Construction certifies nonemptiness
/// with a feasibility LP and throws InfeasibleDomain otherwise.
class PolyhedralDomain {
 public:
  PolyhedralDomain(Index dim, double box_radius, Mat G, Vec h);
  static PolyhedralDomain box(Index dim, double box_radius);

  Index dim() const { return dim_; }
  double box_radius() const { return radius_; }
  const Mat& G() const { return G_; }
  const Vec& h() const { return h_; }
  Index inequalities() const { return G_.rows(); }
  /// Point found by the feasibility LP.
  const Vec& feasible_point() const { return feasible_; }

  bool contains(const Vec& x, double tol) const;
  /// Euclidean projection (exact for a pure box, Dykstra's alternating
  /// projections otherwise).
  Vec project(const Vec& x) const;
  /// Largest t >= 0 with x + t u still in the domain (x assumed inside).
  double max_step(const Vec& x, const Vec& u) const;

 private:
  Index dim_;
  double radius_;
  Mat G_;
  Vec h_;
  Vec feasible_;
};

struct ArgminCertificate {
  double m = 0.0;
  Vec witness;
  double tol = 1e-6;
  /// No seeded feasible perturbation of the witness improved f by more than tol.
  bool certified = false;
  std::string method;
};

struct ArgminOptions {
  double tol = 1e-6;
  int iterations = 20000;
  int perturbations = 200;
  std::uint64_t seed = 0;
};

/// Max-affine objectives (and sums of them) use an epigraph LP over C; all
/// other objectives use projected subgradient descent from the projected box
/// center with steps c / sqrt(k), c = box radius / |initial subgradient|.
ArgminCertificate minimize_over(const ConvexFunction<double>& f, const PolyhedralDomain& C,
                                const ArgminOptions& options = {});

/// x in C (each constraint within tol) and f(x) <= m + tol.
bool argmin_membership(const ConvexFunction<double>& f, const PolyhedralDomain& C, const ArgminCertificate& cert,
                       const Vec& x, double tol);

struct Lemma3Options {
  double tol = 1e-6;
  int samples = 500;
  int line_searches = 24;
  int max_members = 16;
  double distinct_radius = 1e-2;
  std::uint64_t seed = 0;
  ArgminOptions argmin;
};

/// Checks:
///   lemma3.certificate  - the witness is certified and passes membership
///   lemma3.lower_bound  - seeded feasible samples never beat m by 1e-7 (gap = min f(x) - m)
///   lemma3.segment      - every convex combination (lambda = 0.1..0.9) of
///                         harvested members is a member at 10 * tol
///                         (gap = max f(z) - m)
/// The trial is a skip when no harvested member lies farther than
/// distinct_radius from the witness (M is numerically a singleton).
TrialRecord lemma3_check(const ConvexFunction<double>& f, const PolyhedralDomain& C, const Lemma3Options& options);

}  // namespace cvx

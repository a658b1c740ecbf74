#pragma once

// Restriction of a convex function to an affine fiber {y : S y = zeta}.
//
// The fiber is anchor + ker(S) with the anchor the minimum-norm solution, so
// anchor lies in Im(S^T) and has no kernel component. The restricted function
// is parametrized by kernel coordinates w: g(w) = f(anchor + K w).
//
// The restricted subdifferential at embed(w) is the orthogonal projection of
// the ambient subdifferential onto ker(S). It is reported as an ambient-space
// polytope lying inside ker(S).

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cvx/convex_function.hpp"
#include "cvx/errors.hpp"
#include "cvx/linalg.hpp"
#include "cvx/report.hpp"
#include "cvx/tolerances.hpp"

namespace cvx {

template <typename Scalar>
struct AffineFiber {
  Matrix<Scalar> S;
  Vector<Scalar> zeta;
  Vector<Scalar> anchor;
  Subspace<Scalar> kernel;

  Index ambient_dim() const { return S.cols(); }
  Index coordinate_dim() const { return kernel.dim(); }

  Vector<Scalar> embed(const Vector<Scalar>& w) const {
    require_dims(coordinate_dim(), w.size(), "AffineFiber::embed");
    return anchor + kernel.basis * w;
  }

  /// Kernel coordinates of an ambient point; the point is not checked for
  /// membership.
  Vector<Scalar> coordinates(const Vector<Scalar>& x) const {
    require_dims(ambient_dim(), x.size(), "AffineFiber::coordinates");
    return kernel.basis.transpose() * (x - anchor);
  }

  bool contains(const Vector<Scalar>& x, Scalar tol) const {
    require_dims(ambient_dim(), x.size(), "AffineFiber::contains");
    return (S * x - zeta).norm() <= tol;
  }
};

template <typename Scalar>
AffineFiber<Scalar> make_fiber(const Matrix<Scalar>& S, const Vector<Scalar>& zeta,
                               Scalar anchor_tol = Scalar(1e-8), Scalar rank_tol = Scalar(1e-10)) {
  require_dims(S.rows(), zeta.size(), "make_fiber");
  AffineFiber<Scalar> fiber;
  fiber.S = S;
  fiber.zeta = zeta;
  fiber.anchor = solve_anchor(S, zeta, anchor_tol, rank_tol);
  fiber.kernel = kernel(S, rank_tol);
  return fiber;
}

template <typename Scalar>
struct RestrictedFunction {
  ConvexFunction<Scalar> f;
  AffineFiber<Scalar> fiber;

  RestrictedFunction(ConvexFunction<Scalar> fn, AffineFiber<Scalar> fb) : f(std::move(fn)), fiber(std::move(fb)) {
    require_dims(f.dim(), fiber.ambient_dim(), "RestrictedFunction");
  }
  Index coordinate_dim() const { return fiber.coordinate_dim(); }
};

template <typename Scalar>
Scalar restrict_evaluate(const RestrictedFunction<Scalar>& g, const Vector<Scalar>& w) {
  return evaluate(g.f, g.fiber.embed(w));
}

/// The restricted function as a function of kernel coordinates, in the same
/// family as f.
template <typename Scalar>
ConvexFunction<Scalar> pullback(const RestrictedFunction<Scalar>& g) {
  return compose_affine(g.f, g.fiber.kernel.basis, g.fiber.anchor);
}

/// Projection of every generator of the subdifferential of f at x onto W.
template <typename Scalar>
Polytope<Scalar> projected_subdifferential(const ConvexFunction<Scalar>& f, const Vector<Scalar>& x,
                                           const Subspace<Scalar>& W, Scalar active_tol) {
  require_dims(f.dim(), W.ambient_dim, "projected_subdifferential");
  if (W.is_zero()) return Polytope<Scalar>::point(Vector<Scalar>::Zero(W.ambient_dim));
  const Polytope<Scalar> full = subdifferential(f, x, active_tol);
  return Polytope<Scalar>(W.basis * (W.basis.transpose() * full.generators));
}

template <typename Scalar>
Polytope<Scalar> restricted_subdifferential(const RestrictedFunction<Scalar>& g, const Vector<Scalar>& w,
                                            Scalar active_tol = Scalar(1e-9)) {
  return projected_subdifferential(g.f, g.fiber.embed(w), g.fiber.kernel, active_tol);
}

/// max over generators p of p . v
template <typename Scalar>
Scalar support_function(const Polytope<Scalar>& P, const Vector<Scalar>& v) {
  require_dims(P.ambient_dim(), v.size(), "support_function");
  return (v.transpose() * P.generators).maxCoeff();
}

/// Support-function comparison over the given directions (columns).
template <typename Scalar>
bool polytopes_equal(const Polytope<Scalar>& P1, const Polytope<Scalar>& P2, const Matrix<Scalar>& directions,
                     Scalar tol) {
  require_dims(P1.ambient_dim(), P2.ambient_dim(), "polytopes_equal");
  require_dims(P1.ambient_dim(), directions.rows(), "polytopes_equal directions");
  if (directions.cols() == 0) throw PreconditionViolation("polytopes_equal: empty direction list");
  const Matrix<Scalar> s1 = directions.transpose() * P1.generators;
  const Matrix<Scalar> s2 = directions.transpose() * P2.generators;
  return ((s1.rowwise().maxCoeff() - s2.rowwise().maxCoeff()).cwiseAbs().array() <= tol).all();
}

/// All +-e_i, all normalized e_i +- e_j (i < j), then `random_count` seeded
/// random unit vectors. Directions are columns.
template <typename Scalar>
Matrix<Scalar> support_directions(Index dim, Index random_count, std::uint64_t seed) {
  std::vector<Vector<Scalar>> dirs;
  for (Index i = 0; i < dim; ++i) {
    dirs.push_back(Vector<Scalar>::Unit(dim, i));
    dirs.push_back(-Vector<Scalar>::Unit(dim, i));
  }
  const Scalar h = Scalar(1) / std::sqrt(Scalar(2));
  for (Index i = 0; i < dim; ++i) {
    for (Index j = i + 1; j < dim; ++j) {
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          Vector<Scalar> v = Vector<Scalar>::Zero(dim);
          v(i) = Scalar(si) * h;
          v(j) = Scalar(sj) * h;
          dirs.push_back(v);
        }
      }
    }
  }
  if (dim > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index k = 0; k < random_count; ++k) {
      Vector<Scalar> v(dim);
      do {
        for (Index i = 0; i < dim; ++i) v(i) = Scalar(normal(rng));
      } while (v.norm() < Scalar(1e-6));
      dirs.push_back(v / v.norm());
    }
  }
  Matrix<Scalar> out(dim, static_cast<Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) out.col(static_cast<Index>(k)) = dirs[k];
  return out;
}

struct Lemma1Options {
  double active_tol = 1e-9;
  double support_tol = 1e-7;
  double convexity_slack = 1e-9;
  int random_directions = 5;
  int convexity_pairs = 20;
  double pair_radius = 3.0;
  double fd_step = 1e-6;
  double fd_tol = 1e-6;
  std::uint64_t seed = 0;
  /// Mutation fixture: project onto Im(S^T) instead of ker(S). Only for
  /// checking that the checks can fail.
  bool project_onto_row_space = false;
};

/// Verifies the restriction identity at embed(w):
///   lemma1.slice_interval  - for every kernel direction v, the slice interval
///                            [f'_-(x; v), f'_+(x; v)] equals
///                            [-support(P, -v), support(P, v)] of the projected
///                            polytope P (gap = worst deviation);
///   lemma1.fd_oracle       - forward differences of the restricted function
///                            in kernel coordinates reproduce support(P, +-v);
///   lemma1.pullback_equal  - P equals the subdifferential of the pulled-back
///                            function mapped into ambient space, compared by
///                            support functions;
///   lemma1.containment     - every generator of P lies in ker(S);
///   lemma1.restricted_convexity - midpoint convexity of the restricted
///                            function on seeded coordinate pairs (gap = min
///                            midpoint gap).
std::vector<CheckRecord> lemma1_check(const ConvexFunction<double>& f, const AffineFiber<double>& fiber,
                                      const Vec& w, const Lemma1Options& options);

/// Builds the fiber first; throws InfeasibleFiber when zeta is not in Im(S).
std::vector<CheckRecord> lemma1_check(const ConvexFunction<double>& f, const Mat& S, const Vec& zeta, const Vec& w,
                                      const Lemma1Options& options, const Tolerances& tol = {});

}  // namespace cvx

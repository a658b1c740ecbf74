#pragma once

// Dense subspace machinery: orthonormal bases, kernel / row space of a linear
// map, orthogonal projection and minimum-norm anchors of affine fibers.
//
// Everything is templated on the scalar type; bases are stored as the
// orthonormal columns of a dense matrix.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cvx/errors.hpp"

namespace cvx {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = Vector<double>;
using Mat = Matrix<double>;
using Index = Eigen::Index;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw PreconditionViolation(std::string(what) + ": non-finite entry");
}

/// Subspace of R^ambient_dim given by an orthonormal basis (columns).
/// An empty basis is the zero subspace.
template <typename Scalar>
struct Subspace {
  Index ambient_dim = 0;
  Matrix<Scalar> basis;

  Subspace() = default;
  explicit Subspace(Index n) : ambient_dim(n), basis(n, 0) {}
  Subspace(Index n, Matrix<Scalar> b) : ambient_dim(n), basis(std::move(b)) {}

  Index dim() const { return basis.cols(); }
  bool is_zero() const { return basis.cols() == 0; }
  Vector<Scalar> vector(Index i) const { return basis.col(i); }
};

namespace detail {

// Removes the components of v along the columns of basis. Two sweeps
// ("twice is enough") keep the result orthogonal to working precision.
template <typename Scalar>
void orthogonalize_against(const Matrix<Scalar>& basis, Index count, Vector<Scalar>& v) {
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (Index j = 0; j < count; ++j) {
      v -= basis.col(j).dot(v) * basis.col(j);
    }
  }
}

}  // namespace detail

/// Modified Gram-Schmidt with re-orthogonalization over the columns of
/// `vectors`. A column whose residual norm is <= tol is dropped.
template <typename Scalar>
Subspace<Scalar> orthonormalize(const Matrix<Scalar>& vectors, Scalar tol) {
  if (!(tol > Scalar(0))) throw PreconditionViolation("orthonormalize: tol must be positive");
  require_finite(vectors, "orthonormalize");
  const Index n = vectors.rows();
  Matrix<Scalar> basis(n, std::min(n, vectors.cols()));
  Index k = 0;
  for (Index i = 0; i < vectors.cols() && k < n; ++i) {
    Vector<Scalar> v = vectors.col(i);
    detail::orthogonalize_against(basis, k, v);
    const Scalar norm = v.norm();
    if (norm > tol) basis.col(k++) = v / norm;
  }
  return Subspace<Scalar>(n, basis.leftCols(k));
}

template <typename Scalar>
Subspace<Scalar> orthonormalize(const std::vector<Vector<Scalar>>& vectors, Scalar tol) {
  if (vectors.empty()) throw PreconditionViolation("orthonormalize: no vectors (ambient dimension unknown)");
  const Index n = vectors.front().size();
  Matrix<Scalar> cols(n, static_cast<Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    require_dims(n, vectors[i].size(), "orthonormalize");
    cols.col(static_cast<Index>(i)) = vectors[i];
  }
  return orthonormalize<Scalar>(cols, tol);
}

/// Orthonormal basis of Im(S^T). The rank threshold is tol times the largest
/// row norm of S.
template <typename Scalar>
Subspace<Scalar> row_space(const Matrix<Scalar>& S, Scalar tol = Scalar(1e-10)) {
  if (!(tol > Scalar(0))) throw PreconditionViolation("row_space: tol must be positive");
  require_finite(S, "row_space");
  const Index n = S.cols();
  if (S.rows() == 0) return Subspace<Scalar>(n);
  const Scalar scale = S.rowwise().norm().maxCoeff();
  if (scale == Scalar(0)) return Subspace<Scalar>(n);
  return orthonormalize<Scalar>(Matrix<Scalar>(S.transpose()), tol * scale);
}

/// Extends W to an orthonormal basis of the ambient space and returns the
/// added vectors. Coordinate axes are taken greedily by largest residual.
template <typename Scalar>
Subspace<Scalar> orthogonal_complement(const Subspace<Scalar>& W, Scalar tol = Scalar(1e-10)) {
  const Index n = W.ambient_dim;
  Matrix<Scalar> full(n, n);
  full.leftCols(W.dim()) = W.basis;
  Index k = W.dim();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  while (k < n) {
    Index best = -1;
    Scalar best_norm = Scalar(0);
    Vector<Scalar> best_v;
    for (Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      Vector<Scalar> v = Vector<Scalar>::Unit(n, i);
      detail::orthogonalize_against(full, k, v);
      const Scalar norm = v.norm();
      if (norm > best_norm) {
        best = i;
        best_norm = norm;
        best_v = std::move(v);
      }
    }
    if (best < 0 || best_norm <= tol) break;
    used[static_cast<std::size_t>(best)] = true;
    full.col(k++) = best_v / best_norm;
  }
  return Subspace<Scalar>(n, full.middleCols(W.dim(), k - W.dim()));
}

/// Orthonormal basis of ker(S), built as the complement of the row space.
template <typename Scalar>
Subspace<Scalar> kernel(const Matrix<Scalar>& S, Scalar tol = Scalar(1e-10)) {
  return orthogonal_complement(row_space(S, tol), tol);
}

/// Orthogonal projection of x onto W.
template <typename Scalar, typename Derived>
Vector<Scalar> project(const Eigen::MatrixBase<Derived>& x, const Subspace<Scalar>& W) {
  require_dims(W.ambient_dim, x.size(), "project");
  return W.basis * (W.basis.transpose() * x);
}

/// Minimum-norm solution of S y = zeta. Throws InfeasibleFiber when the
/// least-squares residual exceeds tol.
///
/// Works in row-space coordinates y = B c, so the normal equations
/// (SB)^T (SB) c = (SB)^T zeta are r x r and positive definite.
template <typename Scalar>
Vector<Scalar> solve_anchor(const Matrix<Scalar>& S, const Vector<Scalar>& zeta,
                            Scalar tol = Scalar(1e-8), Scalar rank_tol = Scalar(1e-10)) {
  if (!(tol > Scalar(0))) throw PreconditionViolation("solve_anchor: tol must be positive");
  require_dims(S.rows(), zeta.size(), "solve_anchor");
  require_finite(zeta, "solve_anchor");
  const Subspace<Scalar> rows = row_space(S, rank_tol);
  Vector<Scalar> y = Vector<Scalar>::Zero(S.cols());
  if (!rows.is_zero()) {
    const Matrix<Scalar> SB = S * rows.basis;
    const Matrix<Scalar> normal = SB.transpose() * SB;
    const Vector<Scalar> c = normal.ldlt().solve(SB.transpose() * zeta);
    y = rows.basis * c;
  }
  const Scalar residual = (S * y - zeta).norm();
  if (!(residual <= tol)) {
    throw InfeasibleFiber("zeta is not in Im(S): least-squares residual " + std::to_string(double(residual)));
  }
  return y;
}

}  // namespace cvx

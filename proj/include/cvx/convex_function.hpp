#pragma once

// Computable convex functions (finite max of affine pieces, PSD quadratics and
// sums of those) together with their exact pointwise calculus: values,
// subdifferentials in V-representation and one-sided directional derivatives.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cvx/errors.hpp"
#include "cvx/linalg.hpp"

namespace cvx {

template <typename Scalar>
struct AffinePiece {
  Vector<Scalar> a;
  Scalar b = Scalar(0);
};

/// x -> max_i (a_i . x + b_i). Gradients are stored as rows.
template <typename Scalar>
class MaxAffine {
 public:
  MaxAffine(Matrix<Scalar> gradients, Vector<Scalar> offsets)
      : gradients_(std::move(gradients)), offsets_(std::move(offsets)) {
    if (gradients_.rows() == 0) throw PreconditionViolation("MaxAffine: at least one piece required");
    require_dims(gradients_.rows(), offsets_.size(), "MaxAffine offsets");
    require_finite(gradients_, "MaxAffine gradients");
    require_finite(offsets_, "MaxAffine offsets");
  }

  static MaxAffine from_pieces(const std::vector<AffinePiece<Scalar>>& pieces) {
    if (pieces.empty()) throw PreconditionViolation("MaxAffine: at least one piece required");
    const Index n = pieces.front().a.size();
    Matrix<Scalar> g(static_cast<Index>(pieces.size()), n);
    Vector<Scalar> b(static_cast<Index>(pieces.size()));
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      require_dims(n, pieces[i].a.size(), "MaxAffine piece");
      g.row(static_cast<Index>(i)) = pieces[i].a.transpose();
      b(static_cast<Index>(i)) = pieces[i].b;
    }
    return MaxAffine(std::move(g), std::move(b));
  }

  Index dim() const { return gradients_.cols(); }
  Index pieces() const { return gradients_.rows(); }
  const Matrix<Scalar>& gradients() const { return gradients_; }
  const Vector<Scalar>& offsets() const { return offsets_; }
  AffinePiece<Scalar> piece(Index i) const { return {gradients_.row(i).transpose(), offsets_(i)}; }

  template <typename Derived>
  Vector<Scalar> piece_values(const Eigen::MatrixBase<Derived>& x) const {
    return gradients_ * x + offsets_;
  }

 private:
  Matrix<Scalar> gradients_;
  Vector<Scalar> offsets_;
};

/// x -> x^T Q x + c^T x + r0 with Q symmetric positive semidefinite.
template <typename Scalar>
class Quadratic {
 public:
  static constexpr Scalar kSymmetryTol = Scalar(1e-10);
  static constexpr Scalar kEigenFloor = Scalar(-1e-8);

  Quadratic(Matrix<Scalar> Q, Vector<Scalar> c, Scalar r0 = Scalar(0))
      : Q_(std::move(Q)), c_(std::move(c)), r0_(r0) {
    require_dims(Q_.rows(), Q_.cols(), "Quadratic Q (square)");
    require_dims(Q_.rows(), c_.size(), "Quadratic c");
    require_finite(Q_, "Quadratic Q");
    require_finite(c_, "Quadratic c");
    if (!std::isfinite(double(r0_))) throw PreconditionViolation("Quadratic r0: non-finite");
    if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * (Scalar(1) + Q_.cwiseAbs().maxCoeff())) {
      throw NotConvex("Quadratic: Q is not symmetric");
    }
    Q_ = Scalar(0.5) * (Q_ + Q_.transpose()).eval();
    if (Q_.rows() > 0) {
      min_eigenvalue_ = Eigen::SelfAdjointEigenSolver<Matrix<Scalar>>(Q_, Eigen::EigenvaluesOnly).eigenvalues()(0);
      if (min_eigenvalue_ < kEigenFloor) throw NotConvex("Quadratic: Q is not positive semidefinite");
    }
  }

  Index dim() const { return Q_.rows(); }
  const Matrix<Scalar>& Q() const { return Q_; }
  const Vector<Scalar>& c() const { return c_; }
  Scalar r0() const { return r0_; }
  Scalar min_eigenvalue() const { return min_eigenvalue_; }
  bool positive_definite(Scalar floor = Scalar(1e-10)) const { return min_eigenvalue_ > floor; }

  template <typename Derived>
  Scalar value(const Eigen::MatrixBase<Derived>& x) const {
    return x.dot(Q_ * x) + c_.dot(x) + r0_;
  }
  template <typename Derived>
  Vector<Scalar> gradient(const Eigen::MatrixBase<Derived>& x) const {
    return Scalar(2) * (Q_ * x) + c_;
  }

 private:
  Matrix<Scalar> Q_;
  Vector<Scalar> c_;
  Scalar r0_ = Scalar(0);
  Scalar min_eigenvalue_ = Scalar(0);
};

template <typename Scalar>
class ConvexFunction;

template <typename Scalar>
struct Sum {
  std::vector<ConvexFunction<Scalar>> parts;
};

/// Tagged union over the implemented families.
template <typename Scalar>
class ConvexFunction {
 public:
  using Rep = std::variant<MaxAffine<Scalar>, Quadratic<Scalar>, Sum<Scalar>>;

  ConvexFunction(MaxAffine<Scalar> f) : dim_(f.dim()), rep_(std::move(f)) {}
  ConvexFunction(Quadratic<Scalar> f) : dim_(f.dim()), rep_(std::move(f)) {}

  static ConvexFunction sum(std::vector<ConvexFunction> parts) {
    if (parts.empty()) throw PreconditionViolation("Sum: at least one part required");
    const Index n = parts.front().dim();
    for (const auto& p : parts) require_dims(n, p.dim(), "Sum part");
    return ConvexFunction(Sum<Scalar>{std::move(parts)}, n);
  }

  Index dim() const { return dim_; }
  const Rep& rep() const { return rep_; }

  template <typename Visitor>
  decltype(auto) visit(Visitor&& vis) const {
    return std::visit(std::forward<Visitor>(vis), rep_);
  }

  bool is_max_affine() const { return std::holds_alternative<MaxAffine<Scalar>>(rep_); }
  bool is_quadratic() const { return std::holds_alternative<Quadratic<Scalar>>(rep_); }
  bool is_sum() const { return std::holds_alternative<Sum<Scalar>>(rep_); }
  const MaxAffine<Scalar>& as_max_affine() const { return std::get<MaxAffine<Scalar>>(rep_); }
  const Quadratic<Scalar>& as_quadratic() const { return std::get<Quadratic<Scalar>>(rep_); }
  const Sum<Scalar>& as_sum() const { return std::get<Sum<Scalar>>(rep_); }

 private:
  ConvexFunction(Sum<Scalar> s, Index n) : dim_(n), rep_(std::move(s)) {}

  Index dim_ = 0;
  Rep rep_;
};

/// Convex hull of finitely many generators (columns). Redundant generators
/// are allowed.
template <typename Scalar>
struct Polytope {
  Matrix<Scalar> generators;

  Polytope() = default;
  explicit Polytope(Matrix<Scalar> g) : generators(std::move(g)) {
    if (generators.cols() == 0) throw PreconditionViolation("Polytope: at least one generator required");
    require_finite(generators, "Polytope");
  }
  static Polytope point(const Vector<Scalar>& p) { return Polytope(Matrix<Scalar>(p)); }

  Index ambient_dim() const { return generators.rows(); }
  Index size() const { return generators.cols(); }
  Vector<Scalar> generator(Index i) const { return generators.col(i); }
};

/// Closed interval [lo, hi].
template <typename Scalar>
struct Interval {
  Scalar lo;
  Scalar hi;
  Scalar width() const { return hi - lo; }
};

template <typename Scalar, typename Derived>
Scalar evaluate(const ConvexFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& x) {
  require_dims(f.dim(), x.size(), "evaluate");
  return f.visit([&](const auto& g) -> Scalar {
    using T = std::decay_t<decltype(g)>;
    if constexpr (std::is_same_v<T, MaxAffine<Scalar>>) {
      return g.piece_values(x).maxCoeff();
    } else if constexpr (std::is_same_v<T, Quadratic<Scalar>>) {
      return g.value(x);
    } else {
      Scalar total = Scalar(0);
      for (const auto& part : g.parts) total += evaluate(part, x);
      return total;
    }
  });
}

/// Minkowski sum of two generator sets: every pairwise sum.
template <typename Scalar>
Polytope<Scalar> minkowski_sum(const Polytope<Scalar>& p, const Polytope<Scalar>& q) {
  require_dims(p.ambient_dim(), q.ambient_dim(), "minkowski_sum");
  Matrix<Scalar> g(p.ambient_dim(), p.size() * q.size());
  for (Index i = 0; i < p.size(); ++i)
    for (Index j = 0; j < q.size(); ++j) g.col(i * q.size() + j) = p.generators.col(i) + q.generators.col(j);
  return Polytope<Scalar>(std::move(g));
}

/// Subdifferential at x in V-representation. A max-affine piece counts as
/// active when its value is within active_tol * (|max| + 1) of the max.
template <typename Scalar, typename Derived>
Polytope<Scalar> subdifferential(const ConvexFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& x,
                                 Scalar active_tol = Scalar(1e-9)) {
  require_dims(f.dim(), x.size(), "subdifferential");
  if (!(active_tol > Scalar(0))) throw PreconditionViolation("subdifferential: active_tol must be positive");
  return f.visit([&](const auto& g) -> Polytope<Scalar> {
    using T = std::decay_t<decltype(g)>;
    if constexpr (std::is_same_v<T, MaxAffine<Scalar>>) {
      const Vector<Scalar> values = g.piece_values(x);
      const Scalar top = values.maxCoeff();
      const Scalar threshold = top - active_tol * (std::abs(top) + Scalar(1));
      std::vector<Index> active;
      for (Index i = 0; i < values.size(); ++i)
        if (values(i) >= threshold) active.push_back(i);
      Matrix<Scalar> gens(g.dim(), static_cast<Index>(active.size()));
      for (std::size_t k = 0; k < active.size(); ++k)
        gens.col(static_cast<Index>(k)) = g.gradients().row(active[k]).transpose();
      return Polytope<Scalar>(std::move(gens));
    } else if constexpr (std::is_same_v<T, Quadratic<Scalar>>) {
      return Polytope<Scalar>::point(g.gradient(x));
    } else {
      Polytope<Scalar> acc = subdifferential(g.parts.front(), x, active_tol);
      for (std::size_t i = 1; i < g.parts.size(); ++i)
        acc = minkowski_sum(acc, subdifferential(g.parts[i], x, active_tol));
      return acc;
    }
  });
}

/// One element of the subdifferential, without forming Minkowski sums.
template <typename Scalar, typename Derived>
Vector<Scalar> subgradient(const ConvexFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& x) {
  require_dims(f.dim(), x.size(), "subgradient");
  return f.visit([&](const auto& g) -> Vector<Scalar> {
    using T = std::decay_t<decltype(g)>;
    if constexpr (std::is_same_v<T, MaxAffine<Scalar>>) {
      Index best = 0;
      g.piece_values(x).maxCoeff(&best);
      return g.gradients().row(best).transpose();
    } else if constexpr (std::is_same_v<T, Quadratic<Scalar>>) {
      return g.gradient(x);
    } else {
      Vector<Scalar> total = Vector<Scalar>::Zero(f.dim());
      for (const auto& part : g.parts) total += subgradient(part, x);
      return total;
    }
  });
}

template <typename Scalar, typename Derived>
Scalar directional_derivative_plus(const ConvexFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& x,
                                   const Vector<Scalar>& v, Scalar active_tol = Scalar(1e-9)) {
  require_dims(f.dim(), v.size(), "directional_derivative_plus");
  return (v.transpose() * subdifferential(f, x, active_tol).generators).maxCoeff();
}

template <typename Scalar, typename Derived>
Scalar directional_derivative_minus(const ConvexFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& x,
                                    const Vector<Scalar>& v, Scalar active_tol = Scalar(1e-9)) {
  require_dims(f.dim(), v.size(), "directional_derivative_minus");
  return (v.transpose() * subdifferential(f, x, active_tol).generators).minCoeff();
}

/// Subdifferential of the slice t -> f(x + t v) at t = 0: the interval of
/// its left and right derivatives.
template <typename Scalar, typename Derived>
Interval<Scalar> one_dim_subdifferential(const ConvexFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& x,
                                         const Vector<Scalar>& v, Scalar active_tol = Scalar(1e-9)) {
  require_dims(f.dim(), v.size(), "one_dim_subdifferential");
  if (v.squaredNorm() == Scalar(0)) throw PreconditionViolation("one_dim_subdifferential: zero direction");
  const Matrix<Scalar> slopes = v.transpose() * subdifferential(f, x, active_tol).generators;
  return {slopes.minCoeff(), slopes.maxCoeff()};
}

/// Forward difference (f(x + h v) - f(x)) / h. Independent of the
/// subdifferential code path.
template <typename Scalar, typename Derived>
Scalar fd_directional_derivative(const ConvexFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& x,
                                 const Vector<Scalar>& v, Scalar h) {
  if (!(h > Scalar(0))) throw PreconditionViolation("fd_directional_derivative: step must be positive");
  const Vector<Scalar> base = x;
  const Vector<Scalar> moved = base + h * v;
  return (evaluate(f, moved) - evaluate(f, base)) / h;
}

/// w -> f(shift + A w) as a function of the same family.
template <typename Scalar>
ConvexFunction<Scalar> compose_affine(const ConvexFunction<Scalar>& f, const Matrix<Scalar>& A,
                                      const Vector<Scalar>& shift) {
  require_dims(f.dim(), A.rows(), "compose_affine map");
  require_dims(f.dim(), shift.size(), "compose_affine shift");
  return f.visit([&](const auto& g) -> ConvexFunction<Scalar> {
    using T = std::decay_t<decltype(g)>;
    if constexpr (std::is_same_v<T, MaxAffine<Scalar>>) {
      Matrix<Scalar> grads = g.gradients() * A;
      Vector<Scalar> offs = g.gradients() * shift + g.offsets();
      return MaxAffine<Scalar>(std::move(grads), std::move(offs));
    } else if constexpr (std::is_same_v<T, Quadratic<Scalar>>) {
      Matrix<Scalar> Q = A.transpose() * g.Q() * A;
      Q = (Scalar(0.5) * (Q + Q.transpose())).eval();
      Vector<Scalar> c = A.transpose() * g.gradient(shift);
      return Quadratic<Scalar>(std::move(Q), std::move(c), g.value(shift));
    } else {
      std::vector<ConvexFunction<Scalar>> parts;
      parts.reserve(g.parts.size());
      for (const auto& part : g.parts) parts.push_back(compose_affine(part, A, shift));
      return ConvexFunction<Scalar>::sum(std::move(parts));
    }
  });
}

}  // namespace cvx

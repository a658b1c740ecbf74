#include <doctest.h>

#include <random>

#include "cvx/convex_function.hpp"
#include "cvx/generators.hpp"
#include "test_util.hpp"

using namespace cvx;
using namespace testutil;

namespace {

ConvexFunction<double> axis_max() {
  return MaxAffine<double>(mat({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}), Vec::Zero(4));
}

bool has_generator(const Polytope<double>& P, const Vec& g) {
  for (Index i = 0; i < P.size(); ++i)
    if ((P.generator(i) - g).norm() < 1e-12) return true;
  return false;
}

}  // namespace

TEST_CASE("evaluate examples") {
  CHECK(evaluate(axis_max(), vec({3, -1})) == 3.0);
  CHECK(evaluate(squared_norm(2), vec({1, 2})) == 5.0);
  const auto sum = ConvexFunction<double>::sum({axis_max(), squared_norm(2)});
  CHECK(evaluate(sum, vec({1, 2})) == 7.0);
  CHECK_THROWS_AS(evaluate(squared_norm(2), vec({1, 2, 3})), DimensionMismatch);
}

TEST_CASE("subdifferential examples") {
  const Polytope<double> square = subdifferential(l1_norm_2d(), vec({0, 0}), 1e-9);
  CHECK(square.size() == 4);
  for (const Vec& g : {vec({1, 1}), vec({1, -1}), vec({-1, 1}), vec({-1, -1})}) CHECK(has_generator(square, g));

  const Polytope<double> single = subdifferential(l1_norm_2d(), vec({2, 3}), 1e-9);
  REQUIRE(single.size() == 1);
  CHECK((single.generator(0) - vec({1, 1})).norm() == 0.0);

  const Polytope<double> grad = subdifferential(squared_norm(2), vec({1, 2}), 1e-9);
  REQUIRE(grad.size() == 1);
  CHECK((grad.generator(0) - vec({2, 4})).norm() < 1e-15);
}

TEST_CASE("subdifferential of a sum is the Minkowski sum") {
  const auto f = ConvexFunction<double>::sum({l1_norm_2d(), squared_norm(2)});
  const Polytope<double> P = subdifferential(f, vec({0, 0}), 1e-9);
  CHECK(P.size() == 4);
  const Polytope<double> Q = subdifferential(f, vec({1, 0}), 1e-9);
  CHECK(has_generator(Q, vec({3, 1})));
  CHECK(has_generator(Q, vec({3, -1})));
}

TEST_CASE("directional derivative examples") {
  CHECK(directional_derivative_plus(abs_1d(), vec({0}), vec({1})) == 1.0);
  CHECK(directional_derivative_plus(abs_1d(), vec({0}), vec({-1})) == 1.0);
  CHECK(directional_derivative_plus(l1_norm_2d(), vec({0, 0}), vec({1, -1})) == 2.0);
  CHECK(directional_derivative_minus(abs_1d(), vec({0}), vec({1})) == -1.0);
  CHECK(directional_derivative_minus(abs_1d(), vec({2}), vec({1})) == 1.0);
  CHECK(directional_derivative_minus(l1_norm_2d(), vec({0, 0}), vec({1, -1})) == -2.0);
  CHECK_THROWS_AS(directional_derivative_plus(abs_1d(), vec({0}), vec({1, 0})), DimensionMismatch);
}

TEST_CASE("one-dimensional slice subdifferential examples") {
  const Interval<double> kink = one_dim_subdifferential(abs_1d(), vec({0}), vec({1}));
  CHECK(kink.lo == -1.0);
  CHECK(kink.hi == 1.0);
  const Interval<double> scaled = one_dim_subdifferential(abs_1d(), vec({0}), vec({2}));
  CHECK(scaled.lo == -2.0);
  CHECK(scaled.hi == 2.0);
  const Interval<double> smooth = one_dim_subdifferential(squared_norm(2), vec({1, 0}), vec({0, 1}));
  CHECK(smooth.lo == 0.0);
  CHECK(smooth.hi == 0.0);
  CHECK_THROWS_AS(one_dim_subdifferential(abs_1d(), vec({0}), vec({0})), PreconditionViolation);
}

TEST_CASE("finite-difference directional derivative examples") {
  CHECK(fd_directional_derivative(abs_1d(), vec({0}), vec({1}), 1e-6) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fd_directional_derivative(abs_1d(), vec({0}), vec({-1}), 1e-6) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(fd_directional_derivative(squared_norm(1), vec({1}), vec({1}), 1e-6) - (2.0 + 1e-6)) < 1e-9);
  CHECK_THROWS_AS(fd_directional_derivative(abs_1d(), vec({0}), vec({1}), 0.0), PreconditionViolation);
}

TEST_CASE("quadratic validation") {
  CHECK_THROWS_AS(Quadratic<double>(mat({{1, 2}, {0, 1}}), Vec::Zero(2)), NotConvex);
  CHECK_THROWS_AS(Quadratic<double>(mat({{1, 0}, {0, -1}}), Vec::Zero(2)), NotConvex);
  CHECK_THROWS_AS(Quadratic<double>(Mat::Identity(2, 2), Vec::Zero(3)), DimensionMismatch);
  CHECK_THROWS_AS(MaxAffine<double>(Mat(0, 2), Vec(0)), PreconditionViolation);
  CHECK(Quadratic<double>(mat({{1, 0}, {0, 0}}), Vec::Zero(2)).positive_definite() == false);
  CHECK_THROWS_AS(ConvexFunction<double>::sum({abs_1d(), squared_norm(2)}), DimensionMismatch);
}

TEST_CASE("subgradient inequality on random functions") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 1 + static_cast<Index>(trial % 6);
    const ConvexFunction<double> f =
        trial % 3 == 0   ? gen_max_affine(n, 1 + trial % 12, rng())
        : trial % 3 == 1 ? gen_pd_quadratic(n, rng())
                         : ConvexFunction<double>::sum({gen_max_affine(n, 5, rng()), gen_psd_quadratic(n, n / 2, rng())});
    for (int k = 0; k < 20; ++k) {
      const Vec x = random_vec(rng, n, 2.0);
      const Vec y = random_vec(rng, n, 2.0);
      const Polytope<double> P = subdifferential(f, x, 1e-9);
      for (Index g = 0; g < P.size(); ++g)
        CHECK(evaluate(f, y) >= evaluate(f, x) + P.generator(g).dot(y - x) - 1e-8);
    }
  }
}

TEST_CASE("directional derivatives agree with finite differences") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(trial % 5);
    const ConvexFunction<double> f = gen_max_affine(n, 2 + trial % 10, rng());
    Vec x = random_vec(rng, n, 2.0);
    const Vec v = random_vec(rng, n, 1.0);

    // Generic points: the step is far below the distance to a breakpoint.
    for (double h : {1e-4, 1e-6}) {
      CHECK(std::abs(directional_derivative_plus(f, x, v) - fd_directional_derivative(f, x, v, h)) <= 1e-6);
    }

    // Constructed kink: lift a second piece so it ties with the maximum at x.
    const auto& ma = f.as_max_affine();
    Vec offsets = ma.offsets();
    const Vec values = ma.piece_values(x);
    const Index other = (trial + 1) % ma.pieces();
    offsets(other) += values.maxCoeff() - values(other);
    const ConvexFunction<double> kinked = MaxAffine<double>(ma.gradients(), offsets);
    for (double h : {1e-4, 1e-6}) {
      CHECK(std::abs(directional_derivative_plus(kinked, x, v) - fd_directional_derivative(kinked, x, v, h)) <= 1e-6);
      const Vec minus_v = -v;
      CHECK(std::abs(directional_derivative_minus(kinked, x, v) + fd_directional_derivative(kinked, x, minus_v, h)) <=
            1e-6);
    }
  }
}

TEST_CASE("slice interval ordering and positive homogeneity") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(trial % 4);
    const ConvexFunction<double> pwl = gen_max_affine(n, 6, rng());
    const ConvexFunction<double> quad = gen_pd_quadratic(n, rng());
    const Vec x = random_vec(rng, n, 2.0);
    Vec v = random_vec(rng, n, 1.0);
    if (v.norm() < 1e-3) v(0) = 1.0;
    const Interval<double> a = one_dim_subdifferential(pwl, x, v);
    CHECK(a.lo <= a.hi);
    const Interval<double> b = one_dim_subdifferential(quad, x, v);
    CHECK(std::abs(b.width()) <= 1e-10);
    const Vec v2 = 2.0 * v;
    CHECK(std::abs(directional_derivative_plus(pwl, x, v2) - 2.0 * directional_derivative_plus(pwl, x, v)) <= 1e-10);
  }
}

TEST_CASE("compose_affine stays in the family and matches evaluation") {
  std::mt19937_64 rng(10);
  const Mat A = random_vec(rng, 6, 1.0).reshaped(3, 2);
  const Vec shift = random_vec(rng, 3, 1.0);
  for (const ConvexFunction<double>& f :
       {gen_max_affine(3, 5, 1), gen_pd_quadratic(3, 2),
        ConvexFunction<double>::sum({gen_max_affine(3, 4, 3), gen_pd_quadratic(3, 4)})}) {
    const ConvexFunction<double> g = compose_affine(f, A, shift);
    CHECK(g.dim() == 2);
    CHECK(g.rep().index() == f.rep().index());
    for (int k = 0; k < 10; ++k) {
      const Vec w = random_vec(rng, 2, 2.0);
      CHECK(std::abs(evaluate(g, w) - evaluate(f, Vec(shift + A * w))) <= 1e-12);
    }
  }
}

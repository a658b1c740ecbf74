#include <doctest.h>

#include <random>

#include "cvx/generators.hpp"
#include "cvx/restriction.hpp"
#include "test_util.hpp"

using namespace cvx;
using namespace testutil;

namespace {

double interval_of(const Polytope<double>& P, const Vec& v, bool upper) {
  return upper ? support_function(P, v) : -support_function(P, Vec(-v));
}

const CheckRecord& find(const std::vector<CheckRecord>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  return checks.front();
}

bool all_pass(const std::vector<CheckRecord>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace

TEST_CASE("make_fiber examples") {
  const AffineFiber<double> line = make_fiber<double>(mat({{1, 1}}), vec({2}));
  CHECK((line.anchor - vec({1, 1})).norm() < 1e-14);
  REQUIRE(line.coordinate_dim() == 1);
  CHECK(std::abs(std::abs(line.kernel.basis(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(line.kernel.basis(0, 0) + line.kernel.basis(1, 0)) < 1e-15);

  const AffineFiber<double> point = make_fiber<double>(Mat::Identity(2, 2), vec({3, 4}));
  CHECK((point.anchor - vec({3, 4})).norm() < 1e-14);
  CHECK(point.coordinate_dim() == 0);

  CHECK_THROWS_AS(make_fiber<double>(mat({{1, 0}, {1, 0}}), vec({1, 2})), InfeasibleFiber);
}

TEST_CASE("restrict_evaluate examples") {
  const RestrictedFunction<double> g(l1_norm_2d(), make_fiber<double>(mat({{1, 1}}), vec({0})));
  CHECK(std::abs(restrict_evaluate(g, vec({1})) - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(restrict_evaluate(g, vec({-3})) - 3.0 * std::sqrt(2.0)) < 1e-14);

  const RestrictedFunction<double> pt(squared_norm(2), make_fiber<double>(Mat::Identity(2, 2), vec({3, 4})));
  CHECK(restrict_evaluate(pt, Vec(0)) == 25.0);

  // Linear f: c . (anchor + t b) is affine in t.
  const ConvexFunction<double> lin = MaxAffine<double>(mat({{2, -1, 0.5}}), vec({0}));
  const RestrictedFunction<double> h(lin, make_fiber<double>(mat({{1, 0, 1}}), vec({2})));
  const Vec c = vec({2, -1, 0.5});
  CHECK(std::abs(restrict_evaluate(h, Vec(Vec::Zero(2))) - c.dot(h.fiber.anchor)) < 1e-14);
  const Vec w = vec({0.3, -1.2});
  CHECK(std::abs(restrict_evaluate(h, w) - (c.dot(h.fiber.anchor) + c.dot(h.fiber.kernel.basis * w))) < 1e-13);
}

TEST_CASE("restricted subdifferential examples") {
  const RestrictedFunction<double> g(l1_norm_2d(), make_fiber<double>(mat({{1, 1}}), vec({0})));
  const Polytope<double> P = restricted_subdifferential(g, vec({0}));
  const Vec b = g.fiber.kernel.basis.col(0);
  // Segment conv{(1,-1), (-1,1)}; in kernel coordinates [-sqrt 2, sqrt 2].
  CHECK(std::abs(support_function(P, vec({1, -1})) - 2.0) < 1e-14);
  CHECK(std::abs(support_function(P, vec({-1, 1})) - 2.0) < 1e-14);
  CHECK(std::abs(support_function(P, vec({1, 1}))) < 1e-14);
  CHECK(std::abs(interval_of(P, b, true) - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(interval_of(P, b, false) + std::sqrt(2.0)) < 1e-14);

  const RestrictedFunction<double> id(l1_norm_2d(), make_fiber<double>(Mat::Identity(2, 2), vec({0, 0})));
  const Polytope<double> zero = restricted_subdifferential(id, Vec(0));
  REQUIRE(zero.size() == 1);
  CHECK(zero.generator(0).norm() == 0.0);

  const Vec c = vec({2, -1, 0.5});
  const RestrictedFunction<double> lin(MaxAffine<double>(Mat(c.transpose()), vec({1})),
                                       make_fiber<double>(mat({{1, 0, 1}}), vec({2})));
  const Polytope<double> single = restricted_subdifferential(lin, vec({0.5, 0.5}));
  REQUIRE(single.size() == 1);
  CHECK((single.generator(0) - project(c, lin.fiber.kernel)).norm() < 1e-14);
}

TEST_CASE("support function and polytope equality examples") {
  const Polytope<double> square(mat({{1, 1, -1, -1}, {1, -1, 1, -1}}));
  const Polytope<double> segment(mat({{1, -1}, {-1, 1}}));
  CHECK(support_function(square, vec({1, 1})) == 2.0);
  CHECK(support_function(Polytope<double>::point(vec({2, 4})), vec({0, 1})) == 4.0);
  CHECK(support_function(segment, vec({1, -1})) == 2.0);

  const Polytope<double> doubled(mat({{1, 1, -1, -1, 1}, {1, -1, 1, -1, 1}}));
  const Mat dirs = support_directions<double>(2, 10, 3);
  CHECK(polytopes_equal(square, doubled, dirs, 1e-12));
  // Axis directions alone cannot tell them apart; the diagonal (1, 1) does.
  CHECK(polytopes_equal(square, segment, Mat(Mat::Identity(2, 2)), 1e-12));
  CHECK_FALSE(polytopes_equal(square, segment, support_directions<double>(2, 0, 0), 1e-12));
  CHECK_FALSE(polytopes_equal(square, segment, dirs, 1e-12));
  CHECK(polytopes_equal(Polytope<double>::point(vec({0, 0})), Polytope<double>::point(vec({0, 0})), dirs, 0.0));
  CHECK_THROWS_AS(polytopes_equal(square, segment, Mat(2, 0), 1e-12), PreconditionViolation);
  CHECK_THROWS_AS(support_function(square, vec({1, 1, 1})), DimensionMismatch);
}

TEST_CASE("support directions cover axes, diagonals and random units") {
  const Mat d = support_directions<double>(3, 5, 1);
  CHECK(d.cols() == 6 + 12 + 5);
  CHECK((d.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK(support_directions<double>(3, 5, 1) == d);
}

TEST_CASE("restriction check on the l1 instance and its mutation") {
  Lemma1Options opt;
  const auto checks = lemma1_check(l1_norm_2d(), mat({{1, 1}}), vec({0}), vec({0}), opt);
  CHECK(all_pass(checks));
  CHECK(find(checks, "lemma1.slice_interval").gap < 1e-12);

  opt.project_onto_row_space = true;
  const auto mutated = lemma1_check(l1_norm_2d(), mat({{1, 1}}), vec({0}), vec({0}), opt);
  CHECK_FALSE(find(mutated, "lemma1.slice_interval").pass);
}

TEST_CASE("restriction check on a smooth quadratic has zero-width slices") {
  Lemma1Options opt;
  const ConvexFunction<double> f = gen_pd_quadratic(4, 3);
  const auto checks = lemma1_check(f, gen_operator(2, 4, 2, 5), Vec::Zero(2), vec({0.4, -0.7}), opt);
  CHECK(all_pass(checks));
  CHECK_THROWS_AS(lemma1_check(f, mat({{1, 0, 0, 0}, {1, 0, 0, 0}}), vec({1, 2}), Vec::Zero(3), opt),
                  InfeasibleFiber);
}

TEST_CASE("projected polytopes: subadditive support and containment in the kernel") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + static_cast<Index>(trial % 5);
    const Index rank = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - 1));
    const Mat S = gen_operator(rank + 1, n, rank, rng());
    const ConvexFunction<double> f = gen_max_affine(n, 8, rng());
    const AffineFiber<double> fiber = make_fiber<double>(S, Vec(S * random_vec(rng, n, 2.0)));
    const RestrictedFunction<double> g(f, fiber);
    const Polytope<double> P = restricted_subdifferential(g, random_vec(rng, fiber.coordinate_dim(), 1.0));
    CHECK((S * P.generators).colwise().norm().maxCoeff() <= 1e-8);
    const Vec u = random_vec(rng, n, 1.0);
    const Vec v = random_vec(rng, n, 1.0);
    CHECK(support_function(P, Vec(u + v)) <= support_function(P, u) + support_function(P, v) + 1e-10);
  }
}

TEST_CASE("pullback agrees with the ambient restriction") {
  const RestrictedFunction<double> g(gen_max_affine(3, 6, 4), make_fiber<double>(mat({{1, 2, 0}}), vec({1})));
  const ConvexFunction<double> p = pullback(g);
  CHECK(p.dim() == 2);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Vec w = random_vec(rng, 2, 3.0);
    CHECK(std::abs(evaluate(p, w) - restrict_evaluate(g, w)) < 1e-12);
  }
}

#include <doctest.h>

#include <random>

#include "cvx/argmin.hpp"
#include "cvx/generators.hpp"
#include "test_util.hpp"

using namespace cvx;
using namespace testutil;

namespace {

PolyhedralDomain interval(double lo, double hi) {
  // |x| <= R with halfspaces x <= hi, -x <= -lo.
  return PolyhedralDomain(1, std::max(std::abs(lo), std::abs(hi)) + 1.0, mat({{1}, {-1}}), vec({hi, -lo}));
}

PolyhedralDomain box(Index dim, double r) { return PolyhedralDomain(dim, r, Mat(0, dim), Vec(0)); }

// max(0, x - 1, -x - 1) = max(0, |x| - 1)
ConvexFunction<double> dead_zone() { return MaxAffine<double>(mat({{0}, {1}, {-1}}), vec({0, -1, -1})); }

}  // namespace

TEST_CASE("minimize_over examples") {
  const ArgminCertificate a = minimize_over(dead_zone(), box(1, 3));
  CHECK(std::abs(a.m) < 1e-9);
  CHECK(std::abs(a.witness(0)) <= 1.0 + 1e-9);
  CHECK(a.certified);

  const ArgminCertificate b = minimize_over(squared_norm(1), interval(1, 3));
  CHECK(std::abs(b.m - 1.0) < 1e-6);
  CHECK(std::abs(b.witness(0) - 1.0) < 1e-6);

  const ConvexFunction<double> five = MaxAffine<double>(mat({{0, 0}}), vec({5}));
  const ArgminCertificate c = minimize_over(five, box(2, 2));
  CHECK(std::abs(c.m - 5.0) < 1e-12);
  CHECK(box(2, 2).contains(c.witness, 1e-9));
}

TEST_CASE("argmin membership examples") {
  const PolyhedralDomain C = box(1, 3);
  const ArgminCertificate a = minimize_over(dead_zone(), C);
  CHECK(argmin_membership(dead_zone(), C, a, vec({0.5}), 1e-6));
  CHECK_FALSE(argmin_membership(dead_zone(), C, a, vec({2}), 1e-6));
  CHECK_FALSE(argmin_membership(dead_zone(), C, a, vec({3.5}), 1e-6));

  const ArgminCertificate q = minimize_over(squared_norm(1), C);
  CHECK(argmin_membership(squared_norm(1), C, q, vec({0}), 1e-6));
  CHECK_FALSE(argmin_membership(squared_norm(1), C, q, vec({0.1}), 1e-6));
}

TEST_CASE("empty domains are rejected") {
  CHECK_THROWS_AS(interval(2, 1), InfeasibleDomain);
  CHECK_THROWS_AS(PolyhedralDomain(1, 1.0, mat({{1}}), vec({-2})), InfeasibleDomain);
}

TEST_CASE("domain projection and steps") {
  const PolyhedralDomain C(2, 2.0, mat({{1, 1}}), vec({1}));
  const Vec p = C.project(vec({3, 3}));
  CHECK(C.contains(p, 1e-7));
  CHECK(std::abs(p(0) - 0.5) < 1e-6);
  CHECK(std::abs(p(1) - 0.5) < 1e-6);
  CHECK(std::abs(C.max_step(vec({0, 0}), vec({1, 0})) - 1.0) < 1e-12);
}

TEST_CASE("argmin convexity check examples") {
  Lemma3Options opt;
  const TrialRecord a = lemma3_check(dead_zone(), box(1, 3), opt);
  CHECK(a.status == TrialStatus::pass);

  const TrialRecord b = lemma3_check(squared_norm(1), box(1, 3), opt);
  CHECK(b.status == TrialStatus::skip);
  CHECK(b.note.rfind("SkippedDegenerate", 0) == 0);

  const ConvexFunction<double> slab = MaxAffine<double>(mat({{0, 0}, {1, 0}, {-1, 0}}), vec({0, -1, -1}));
  const TrialRecord c = lemma3_check(slab, box(2, 2), opt);
  CHECK(c.status == TrialStatus::pass);
}

TEST_CASE("certified minima bound sampled values and witnesses are members") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 1 + trial % 3;
    const ConvexFunction<double> f = trial % 3 == 0   ? gen_flat_bottom_max_affine(d, 4, rng())
                                     : trial % 3 == 1 ? gen_pd_quadratic(d, rng())
                                                      : gen_max_affine(d, 6, rng());
    const PolyhedralDomain C(d, 2.0, Mat(random_vec(rng, d, 1.0).transpose()), vec({0.5}));
    const ArgminCertificate cert = minimize_over(f, C);
    CAPTURE(trial);
    CHECK(argmin_membership(f, C, cert, cert.witness, cert.tol));
    for (int k = 0; k < 200; ++k) {
      const Vec x = C.project(random_vec(rng, d, 2.0));
      if (C.contains(x, 1e-9)) CHECK(evaluate(f, x) >= cert.m - 1e-7);
    }
  }
}

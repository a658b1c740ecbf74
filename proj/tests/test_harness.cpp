#include <doctest.h>

#include <set>

#include "cvx/generators.hpp"
#include "cvx/harness.hpp"
#include "cvx/linalg.hpp"
#include "cvx/oracle.hpp"
#include "cvx/report.hpp"
#include "test_util.hpp"

using namespace cvx;
using namespace testutil;

namespace {

bool same_function(const ConvexFunction<double>& a, const ConvexFunction<double>& b) {
  if (a.is_max_affine() && b.is_max_affine())
    return a.as_max_affine().gradients() == b.as_max_affine().gradients() &&
           a.as_max_affine().offsets() == b.as_max_affine().offsets();
  if (a.is_quadratic() && b.is_quadratic())
    return a.as_quadratic().Q() == b.as_quadratic().Q() && a.as_quadratic().c() == b.as_quadratic().c() &&
           a.as_quadratic().r0() == b.as_quadratic().r0();
  return false;
}

}  // namespace

TEST_CASE("seed splitting gives distinct per-trial streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 0; stream < 4; ++stream)
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(split_seed(42, stream, i));
  CHECK(seen.size() == 4000);
  CHECK(split_seed(42, 1, 7) == split_seed(42, 1, 7));
  CHECK(split_seed(42, 1, 7) != split_seed(43, 1, 7));
}

TEST_CASE("random max-affine generator") {
  CHECK(same_function(gen_max_affine(2, 4, 7), gen_max_affine(2, 4, 7)));
  CHECK_FALSE(same_function(gen_max_affine(2, 4, 7), gen_max_affine(2, 4, 8)));
  const ConvexFunction<double> affine = gen_max_affine(1, 1, 99);
  CHECK(affine.as_max_affine().pieces() == 1);
  CHECK(subdifferential(affine, vec({0.3}), 1e-9).size() == 1);
  const ConvexFunction<double> f = gen_max_affine(3, 12, 1);
  CHECK(f.as_max_affine().gradients().cwiseAbs().maxCoeff() <= 2.0);
  CHECK(f.as_max_affine().offsets().cwiseAbs().maxCoeff() <= 2.0);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const Vec x = random_vec(rng, 3, 2.0), y = random_vec(rng, 3, 2.0);
    const Polytope<double> P = subdifferential(f, x, 1e-9);
    for (Index g = 0; g < P.size(); ++g) CHECK(evaluate(f, y) >= evaluate(f, x) + P.generator(g).dot(y - x) - 1e-8);
  }
  CHECK_THROWS_AS(gen_max_affine(2, 0, 1), PreconditionViolation);
}

TEST_CASE("positive definite quadratic generator") {
  const ConvexFunction<double> one = gen_pd_quadratic(1, 5);
  CHECK(one.as_quadratic().Q()(0, 0) >= 0.1);
  CHECK(same_function(gen_pd_quadratic(3, 5), gen_pd_quadratic(3, 5)));
  const Mat Q = gen_pd_quadratic(4, 3).as_quadratic().Q();
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(Q).eigenvalues().minCoeff() >= 0.1 - 1e-12);
}

TEST_CASE("operator generator has the requested rank") {
  CHECK(gen_operator(3, 4, 2, 9) == gen_operator(3, 4, 2, 9));
  CHECK(gen_operator(3, 4, 0, 9).isZero(0.0));
  for (Index rank = 0; rank <= 3; ++rank) CHECK(row_space<double>(gen_operator(3, 5, rank, 11), 1e-8).dim() == rank);
  CHECK_THROWS_AS(gen_operator(2, 3, 3, 1), PreconditionViolation);
}

TEST_CASE("instance specs are validated") {
  InstanceSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.max_dim = 17;
  CHECK_THROWS_AS(spec.validate(), PreconditionViolation);
  spec = {};
  spec.max_pieces = 41;
  CHECK_THROWS_AS(spec.validate(), PreconditionViolation);
  spec = {};
  spec.min_dim = 4;
  spec.max_dim = 3;
  CHECK_THROWS_AS(spec.validate(), PreconditionViolation);
  spec = {};
  spec.family = FunctionFamily::quadratic;
  spec.seed = 3;
  const ConvexFunction<double> f = generate(spec);
  CHECK(f.is_quadratic());
  CHECK(same_function(f, generate(spec)));
}

TEST_CASE("brute-force fiber minimum examples") {
  // min r1^2 + r2^2 on r1 + r2 = 2 is 2 at (1, 1).
  const double q = brute_force_min_over_fiber(squared_norm(2), mat({{1}, {1}}), vec({2}), 1e-2, 5.0);
  CHECK(std::abs(q - 2.0) <= 1e-4);
  const ConvexFunction<double> f = gen_max_affine(3, 5, 2);
  const Vec x = vec({0.3, -0.2, 1.1});
  CHECK(brute_force_min_over_fiber(f, Mat::Identity(3, 3), x, 1e-2, 5.0) == evaluate(f, x));
  const double p = brute_force_min_over_fiber(l1_norm_2d(), mat({{1}, {1}}), vec({3}), 1e-2, 5.0);
  CHECK(std::abs(p - 3.0) <= 1e-2);
  CHECK_THROWS_AS(brute_force_min_over_fiber(squared_norm(5), mat({{1}, {0}, {0}, {0}, {0}}), vec({1}), 1e-2, 1.0),
                  FiberTooLarge);
}

TEST_CASE("suite runs are reproducible and independent of threading") {
  SuiteConfig cfg;
  cfg.trials = 12;
  cfg.threads = 1;
  const std::string serial = report_json(run_suite(SuiteId::all, cfg));
  cfg.threads = 4;
  const std::string parallel = report_json(run_suite(SuiteId::all, cfg));
  CHECK(serial == parallel);
  cfg.seed = 7;
  CHECK(report_json(run_suite(SuiteId::all, cfg)) != serial);
}

TEST_CASE("empty suites have zero counts") {
  SuiteConfig cfg;
  cfg.trials = 0;
  const SuiteReport r = run_suite(SuiteId::all, cfg);
  CHECK(r.trials.empty());
  CHECK(r.summary().total() == 0);
  CHECK(r.all_passed());
}

TEST_CASE("summaries tally trial records and failures carry replayable instances") {
  SuiteConfig cfg;
  cfg.trials = 20;
  cfg.mutation = Mutation::row_space_projection;
  const SuiteReport r = run_suite(SuiteId::lemma1, cfg);
  const Summary s = r.summary();
  CHECK(s.total() == 20);
  CHECK(s.fail >= 1);
  for (const auto& t : r.trials) {
    if (!t.failed()) continue;
    CHECK(t.instance.contains("function"));
    CHECK(t.instance.contains("S"));
    CHECK(t.instance.contains("zeta"));
    CHECK(t.instance.contains("w"));
  }
  const nlohmann::json j = nlohmann::json::parse(report_json(r));
  CHECK(j["summary"]["fail"] == s.fail);
  CHECK(j["trials"].size() == 20);
}

TEST_CASE("suite and mutation names round-trip") {
  for (SuiteId s : {SuiteId::lemma1, SuiteId::lemma2, SuiteId::lemma3, SuiteId::all})
    CHECK(parse_suite(to_string(s)) == s);
  for (Mutation m : {Mutation::none, Mutation::row_space_projection, Mutation::suboptimal_witness})
    CHECK(parse_mutation(to_string(m)) == m);
  CHECK_FALSE(parse_suite("lemma4").has_value());
}

TEST_CASE("CSV reports have one row per trial in a fixed column order") {
  SuiteConfig cfg;
  cfg.trials = 3;
  const std::string csv = report_csv(run_suite(SuiteId::lemma1, cfg));
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "suite,trial,status,checks,failed_checks,first_failed_check,first_failed_gap");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 3);
}

#pragma once

// Orchestration of the three property suites over seeded instances.
//
// Each trial derives its own seed from (global seed, suite, trial index), so
// trials can run in any order or in parallel; results are merged in index
// order and the serialized report depends only on the configuration.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "cvx/marginal.hpp"
#include "cvx/report.hpp"
#include "cvx/tolerances.hpp"

namespace cvx {

enum class SuiteId { lemma1, lemma2, lemma3, all };
enum class Lemma2Family { mixed, max_affine, quadratic };
enum class Mutation { none, row_space_projection, suboptimal_witness };

const char* to_string(SuiteId s);
const char* to_string(Mutation m);
std::optional<SuiteId> parse_suite(const std::string& s);
std::optional<Mutation> parse_mutation(const std::string& s);

struct SuiteConfig {
  std::size_t trials = 100;
  std::uint64_t seed = 42;
  int max_dim = 6;
  Tolerances tol;
  Lemma2Family lemma2_family = Lemma2Family::mixed;
  /// Lemma 2 trials restricted to fiber dimension 1..3, each with a
  /// brute-force grid comparison.
  bool lemma2_oracle_mode = false;
  /// Outside oracle mode, run the grid comparison when the fiber dimension
  /// is at most this.
  int oracle_max_fiber_dim = 1;
  Mutation mutation = Mutation::none;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

TrialRecord lemma1_trial(const SuiteConfig& config, std::size_t index);
TrialRecord lemma2_trial(const SuiteConfig& config, std::size_t index);
TrialRecord lemma3_trial(const SuiteConfig& config, std::size_t index);

SuiteReport run_suite(SuiteId which, const SuiteConfig& config);

/// Mutation fixture: a feasible but suboptimal marginal witness (the true
/// argmin moved one unit along the fiber).
MinimizationWitness suboptimal_marginal(const MarginalFunction& h, const Vec& x, const MarginalOptions& options);

}  // namespace cvx

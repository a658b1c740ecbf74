#pragma once

// Seeded random instances. Every generator is a pure function of its
// arguments; coefficient ranges are fixed: max-affine pieces in [-2, 2],
// operator factors and quadratic factors in [-1, 1].

#include <cstdint>
#include <string>

#include "cvx/convex_function.hpp"
#include "cvx/linalg.hpp"

namespace cvx {

/// Counter-based seed splitting (splitmix64 over global seed, stream, index).
std::uint64_t split_seed(std::uint64_t global, std::uint64_t stream, std::uint64_t index);

enum class FunctionFamily { max_affine, quadratic, sum };

struct InstanceSpec {
  FunctionFamily family = FunctionFamily::max_affine;
  int min_dim = 1;
  int max_dim = 6;
  int min_pieces = 1;
  int max_pieces = 12;
  int min_rank = 0;
  int max_rank = 6;
  std::uint64_t seed = 0;

  /// Ranges nonempty, dims <= 16, pieces <= 40. Throws PreconditionViolation.
  void validate() const;
};

ConvexFunction<double> gen_max_affine(Index dim, Index pieces, std::uint64_t seed);

/// gen_max_affine plus the 2 * dim pieces +-3 e_j, so f >= 3 |x|_inf - 2
/// and every minimum over an affine set is attained.
ConvexFunction<double> gen_coercive_max_affine(Index dim, Index pieces, std::uint64_t seed);

/// max(0, a_i . x + b_i) with b_i in [-2, -0.5]: zero on a full-dimensional
/// polyhedron around the origin.
ConvexFunction<double> gen_flat_bottom_max_affine(Index dim, Index pieces, std::uint64_t seed);

/// Q = A^T A + 0.1 I with A entries in [-1, 1]; c in [-1, 1], r0 = 0.
ConvexFunction<double> gen_pd_quadratic(Index dim, std::uint64_t seed);

/// Rank-deficient PSD quadratic: Q = sum_i l_i u_i u_i^T over `rank`
/// orthonormal u_i with l_i in [0.5, 2], and c = Q z so the minimum is
/// attained on an affine set of dimension dim - rank.
ConvexFunction<double> gen_psd_quadratic(Index dim, Index rank, std::uint64_t seed);

/// rows x cols matrix of the requested rank (a map R^cols -> R^rows), built
/// as a product of random rank factors.
Mat gen_operator(Index rows, Index cols, Index rank, std::uint64_t seed);

/// Builds one function according to spec (dimension and piece count drawn
/// from the spec ranges).
ConvexFunction<double> generate(const InstanceSpec& spec);

}  // namespace cvx

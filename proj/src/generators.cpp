#include "cvx/generators.hpp"

#include <random>

#include "cvx/errors.hpp"

namespace cvx {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Mat uniform_matrix(Index rows, Index cols, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t global, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(global) ^ stream) ^ index);
}

void InstanceSpec::validate() const {
  if (min_dim < 1 || min_dim > max_dim || max_dim > 16) throw PreconditionViolation("InstanceSpec: bad dim range");
  if (min_pieces < 1 || min_pieces > max_pieces || max_pieces > 40) {
    throw PreconditionViolation("InstanceSpec: bad piece range");
  }
  if (min_rank < 0 || min_rank > max_rank) throw PreconditionViolation("InstanceSpec: bad rank range");
}

ConvexFunction<double> gen_max_affine(Index dim, Index pieces, std::uint64_t seed) {
  if (pieces < 1) throw PreconditionViolation("gen_max_affine: pieces must be >= 1");
  std::mt19937_64 rng(seed);
  Mat a = uniform_matrix(pieces, dim, -2.0, 2.0, rng);
  Vec b = uniform_matrix(pieces, 1, -2.0, 2.0, rng);
  return MaxAffine<double>(std::move(a), std::move(b));
}

ConvexFunction<double> gen_coercive_max_affine(Index dim, Index pieces, std::uint64_t seed) {
  const ConvexFunction<double> base_fn = gen_max_affine(dim, pieces, seed);
  const auto& base = base_fn.as_max_affine();
  Mat a(pieces + 2 * dim, dim);
  Vec b(pieces + 2 * dim);
  a.topRows(pieces) = base.gradients();
  b.head(pieces) = base.offsets();
  for (Index j = 0; j < dim; ++j) {
    a.row(pieces + 2 * j) = 3.0 * Vec::Unit(dim, j).transpose();
    a.row(pieces + 2 * j + 1) = -3.0 * Vec::Unit(dim, j).transpose();
    b(pieces + 2 * j) = -2.0;
    b(pieces + 2 * j + 1) = -2.0;
  }
  return MaxAffine<double>(std::move(a), std::move(b));
}

ConvexFunction<double> gen_flat_bottom_max_affine(Index dim, Index pieces, std::uint64_t seed) {
  if (pieces < 1) throw PreconditionViolation("gen_flat_bottom_max_affine: pieces must be >= 1");
  std::mt19937_64 rng(seed);
  Mat a = Mat::Zero(pieces + 1, dim);
  Vec b = Vec::Zero(pieces + 1);
  a.bottomRows(pieces) = uniform_matrix(pieces, dim, -2.0, 2.0, rng);
  b.tail(pieces) = uniform_matrix(pieces, 1, -2.0, -0.5, rng);
  return MaxAffine<double>(std::move(a), std::move(b));
}

ConvexFunction<double> gen_pd_quadratic(Index dim, std::uint64_t seed) {
  if (dim < 1) throw PreconditionViolation("gen_pd_quadratic: dim must be >= 1");
  std::mt19937_64 rng(seed);
  const Mat A = uniform_matrix(dim, dim, -1.0, 1.0, rng);
  Mat Q = A.transpose() * A + 0.1 * Mat::Identity(dim, dim);
  Vec c = uniform_matrix(dim, 1, -1.0, 1.0, rng);
  return Quadratic<double>(std::move(Q), std::move(c), 0.0);
}

ConvexFunction<double> gen_psd_quadratic(Index dim, Index rank, std::uint64_t seed) {
  if (rank < 0 || rank > dim) throw PreconditionViolation("gen_psd_quadratic: rank out of range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  Mat Q = Mat::Zero(dim, dim);
  if (rank > 0) {
    Subspace<double> U(dim);
    while (U.dim() < rank) U = orthonormalize<double>(uniform_matrix(dim, rank, -1.0, 1.0, rng), 1e-6);
    for (Index i = 0; i < rank; ++i) Q += weight(rng) * U.basis.col(i) * U.basis.col(i).transpose();
  }
  const Vec z = uniform_matrix(dim, 1, -1.0, 1.0, rng);
  Vec c = Q * z;
  return Quadratic<double>(std::move(Q), std::move(c), 0.0);
}

Mat gen_operator(Index rows, Index cols, Index rank, std::uint64_t seed) {
  if (rank < 0 || rank > std::min(rows, cols)) throw PreconditionViolation("gen_operator: rank out of range");
  std::mt19937_64 rng(seed);
  for (;;) {
    const Mat left = uniform_matrix(rows, rank, -1.0, 1.0, rng);
    const Mat right = uniform_matrix(rank, cols, -1.0, 1.0, rng);
    Mat S = left * right;
    if (rank == 0) return Mat::Zero(rows, cols);
    // Redraw in the (measure-zero in exact arithmetic) case of a rank drop.
    if (row_space<double>(S, 1e-8).dim() == rank) return S;
  }
}

ConvexFunction<double> generate(const InstanceSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const Index dim = std::uniform_int_distribution<Index>(spec.min_dim, spec.max_dim)(rng);
  const Index pieces = std::uniform_int_distribution<Index>(spec.min_pieces, spec.max_pieces)(rng);
  const std::uint64_t sub = rng();
  switch (spec.family) {
    case FunctionFamily::max_affine: return gen_max_affine(dim, pieces, sub);
    case FunctionFamily::quadratic: return gen_pd_quadratic(dim, sub);
    case FunctionFamily::sum: return ConvexFunction<double>::sum({gen_max_affine(dim, pieces, sub), gen_pd_quadratic(dim, sub + 1)});
  }
  throw PreconditionViolation("generate: unknown family");
}

}  // namespace cvx

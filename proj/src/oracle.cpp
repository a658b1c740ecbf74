#include "cvx/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cvx/errors.hpp"

namespace cvx {

namespace {

struct GridResult {
  double value = std::numeric_limits<double>::infinity();
  Vec w;
};

// Minimum over the grid center + step * (i_1, ..., i_k), |i_j| <= half.
GridResult grid_min(const ConvexFunction<double>& f, const Vec& anchor, const Mat& K, const Vec& center, double step,
                    long half) {
  const Index k = K.cols();
  GridResult best;
  best.w = center;
  std::array<long, 3> idx{-half, -half, -half};
  Vec w(k);
  Vec r(anchor.size());
  for (;;) {
    for (Index j = 0; j < k; ++j) w(j) = center(j) + step * double(idx[static_cast<std::size_t>(j)]);
    r.noalias() = anchor + K * w;
    const double value = evaluate(f, r);
    if (value < best.value) {
      best.value = value;
      best.w = w;
    }
    Index j = 0;
    while (j < k && ++idx[static_cast<std::size_t>(j)] > half) idx[static_cast<std::size_t>(j++)] = -half;
    if (j == k) break;
  }
  return best;
}

}  // namespace

double brute_force_min_over_fiber(const ConvexFunction<double>& f, const Mat& S, const Vec& x, double pitch,
                                  double radius, std::size_t max_points, int refine_levels) {
  if (!(pitch > 0.0) || !(radius > 0.0)) throw PreconditionViolation("brute_force_min_over_fiber: bad grid");
  require_dims(f.dim(), S.rows(), "brute_force_min_over_fiber");
  const Mat St = S.transpose();
  const Vec anchor = solve_anchor<double>(St, x, 1e-8 * std::max(1.0, x.norm()));
  const Subspace<double> fiber = kernel<double>(St);
  const Index k = fiber.dim();
  if (k > 3) throw FiberTooLarge("brute_force_min_over_fiber: fiber dimension " + std::to_string(k) + " > 3");
  if (k == 0) return evaluate(f, anchor);

  long half = std::lround(std::floor(radius / pitch));
  double step = pitch;
  const double per_axis = std::floor(std::pow(double(max_points), 1.0 / double(k)));
  if (std::pow(double(2 * half + 1), double(k)) > double(max_points)) {
    half = std::max(1L, static_cast<long>((per_axis - 1.0) / 2.0));
    step = radius / double(half);
  }
  GridResult best = grid_min(f, anchor, fiber.basis, Vec::Zero(k), step, half);

  // Zoom: halve the step each level on a window of `reach` steps around the
  // incumbent, re-centering while the incumbent lands on the window boundary.
  // The wide window keeps narrow diagonal valleys from stalling the search.
  const long reach = std::clamp(static_cast<long>((per_axis - 1.0) / 2.0), 1L, 50L);
  const double finest = pitch / std::pow(10.0, refine_levels);
  while (step > finest * (1.0 + 1e-9)) {
    step = std::max(step / 2.0, finest);
    for (int moves = 0; moves < 100; ++moves) {
      const GridResult local = grid_min(f, anchor, fiber.basis, best.w, step, reach);
      if (!(local.value < best.value)) break;
      const double shift = (local.w - best.w).cwiseAbs().maxCoeff();
      best = local;
      if (shift < (double(reach) - 0.5) * step) break;
    }
  }
  return best.value;
}

}  // namespace cvx

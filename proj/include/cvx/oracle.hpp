#pragma once

#include <cstddef>

#include "cvx/convex_function.hpp"
#include "cvx/linalg.hpp"

namespace cvx {

/// Brute-force minimum of f over the fiber {r : S^T r = x}.
///
/// The fiber is parametrized by an orthonormal kernel basis of S^T around the
/// minimum-norm anchor and kernel coordinates are gridded over
/// [-radius, radius]^k at the given pitch. When the full grid would exceed
/// max_points, a coarser grid within the budget is used first. The incumbent
/// is then refined by halving the step (down to pitch / 10^refine_levels) on
/// windows of up to 50 steps per side, re-centered while the incumbent lands
/// on the window boundary. Throws FiberTooLarge for k > 3.
double brute_force_min_over_fiber(const ConvexFunction<double>& f, const Mat& S, const Vec& x, double pitch,
                                  double radius, std::size_t max_points = 10'000'000, int refine_levels = 2);

}  // namespace cvx

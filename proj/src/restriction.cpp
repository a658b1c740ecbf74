#include "cvx/restriction.hpp"

#include <algorithm>
#include <random>

#include "cvx/json_io.hpp"

namespace cvx {

namespace {


// Kernel basis vectors, their negatives, then seeded random unit
// combinations, all in kernel coordinates.
Mat coordinate_directions(Index k, int random_count, std::mt19937_64& rng) {
  std::vector<Vec> dirs;
  for (Index i = 0; i < k; ++i) {
    dirs.push_back(Vec::Unit(k, i));
    dirs.push_back(-Vec::Unit(k, i));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < random_count && k > 0; ++r) {
    Vec u(k);
    do {
      for (Index i = 0; i < k; ++i) u(i) = normal(rng);
    } while (u.norm() < 1e-6);
    dirs.push_back(u / u.norm());
  }
  Mat out(k, static_cast<Index>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) out.col(static_cast<Index>(i)) = dirs[i];
  return out;
}

}  // namespace

std::vector<CheckRecord> lemma1_check(const ConvexFunction<double>& f, const AffineFiber<double>& fiber, const Vec& w,
                                      const Lemma1Options& opt) {
  const RestrictedFunction<double> g(f, fiber);
  const Vec x = fiber.embed(w);
  const Index k = fiber.coordinate_dim();
  std::mt19937_64 rng(opt.seed);

  const Subspace<double>& target = opt.project_onto_row_space ? row_space(fiber.S) : fiber.kernel;
  const Polytope<double> P = projected_subdifferential(f, x, target, opt.active_tol);

  std::vector<CheckRecord> out;
  const Mat coord_dirs = coordinate_directions(k, opt.random_directions, rng);
  const Mat dirs = fiber.kernel.basis * coord_dirs;

  {
    CheckRecord rec{"lemma1.slice_interval", true, 0.0, nlohmann::json::object()};
    nlohmann::json worst;
    for (Index j = 0; j < dirs.cols(); ++j) {
      const Vec v = dirs.col(j);
      const Interval<double> slice = one_dim_subdifferential(f, x, v, opt.active_tol);
      const double hi = support_function(P, v);
      const double lo = -support_function(P, Vec(-v));
      const double dev = std::max(std::abs(slice.hi - hi), std::abs(slice.lo - lo));
      if (dev >= rec.gap) {
        rec.gap = dev;
        worst = {{"direction", vec_json(v)}, {"slice", {slice.lo, slice.hi}}, {"projected", {lo, hi}}};
      }
    }
    rec.pass = rec.gap <= opt.support_tol;
    rec.witness = {{"x", vec_json(x)}, {"directions", dirs.cols()}, {"worst", worst}};
    out.push_back(std::move(rec));
  }

  {
    // Richardson-combined forward differences: exact for quadratics and for
    // max-affine slices once the step is below the nearest breakpoint.
    CheckRecord rec{"lemma1.fd_oracle", true, 0.0, nlohmann::json::object()};
    nlohmann::json worst;
    const double h = opt.fd_step;
    const double g0 = restrict_evaluate(g, w);
    auto one_sided = [&](const Vec& u) {
      const double d1 = (restrict_evaluate(g, Vec(w + h * u)) - g0) / h;
      const double d2 = (restrict_evaluate(g, Vec(w + 0.5 * h * u)) - g0) / (0.5 * h);
      return 2.0 * d2 - d1;
    };
    for (Index j = 0; j < coord_dirs.cols(); ++j) {
      const Vec u = coord_dirs.col(j);
      const Vec v = dirs.col(j);
      const double right = one_sided(u);
      const double left = -one_sided(Vec(-u));
      const double dev = std::max(std::abs(right - support_function(P, v)),
                                  std::abs(left + support_function(P, Vec(-v))));
      if (dev >= rec.gap) {
        rec.gap = dev;
        worst = {{"coordinate_direction", vec_json(u)}, {"fd", {left, right}}};
      }
    }
    rec.pass = rec.gap <= opt.fd_tol;
    rec.witness = {{"w", vec_json(w)}, {"step", h}, {"worst", worst}};
    out.push_back(std::move(rec));
  }

  {
    CheckRecord rec{"lemma1.pullback_equal", true, 0.0, nlohmann::json::object()};
    const ConvexFunction<double> pulled = pullback(g);
    const Polytope<double> coords = subdifferential(pulled, w, opt.active_tol);
    const Polytope<double> mapped(fiber.kernel.basis * coords.generators);
    const Mat probe = support_directions<double>(fiber.ambient_dim(), 50, rng());
    const Mat s1 = probe.transpose() * mapped.generators;
    const Mat s2 = probe.transpose() * P.generators;
    rec.gap = (s1.rowwise().maxCoeff() - s2.rowwise().maxCoeff()).cwiseAbs().maxCoeff();
    rec.pass = polytopes_equal(mapped, P, probe, opt.support_tol);
    rec.witness = {{"pullback_generators", coords.size()}, {"projected_generators", P.size()}};
    out.push_back(std::move(rec));
  }

  {
    CheckRecord rec{"lemma1.containment", true, 0.0, nlohmann::json::object()};
    rec.gap = (fiber.S * P.generators).colwise().norm().maxCoeff();
    rec.pass = rec.gap <= 1e-8;
    out.push_back(std::move(rec));
  }

  {
    CheckRecord rec{"lemma1.restricted_convexity", true, 0.0, nlohmann::json::object()};
    if (k == 0) {
      rec.witness = {{"note", "zero-dimensional fiber"}};
    } else {
      std::uniform_real_distribution<double> unif(-opt.pair_radius, opt.pair_radius);
      double worst = std::numeric_limits<double>::infinity();
      nlohmann::json worst_pair;
      for (int p = 0; p < opt.convexity_pairs; ++p) {
        Vec a(k), b(k);
        for (Index i = 0; i < k; ++i) a(i) = w(i) + unif(rng);
        for (Index i = 0; i < k; ++i) b(i) = w(i) + unif(rng);
        const double gap =
            0.5 * (restrict_evaluate(g, a) + restrict_evaluate(g, b)) - restrict_evaluate(g, Vec(0.5 * (a + b)));
        if (gap < worst) {
          worst = gap;
          worst_pair = {vec_json(a), vec_json(b)};
        }
      }
      rec.gap = worst;
      rec.pass = worst >= -opt.convexity_slack;
      rec.witness = {{"pairs", opt.convexity_pairs}, {"worst_pair", worst_pair}};
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<CheckRecord> lemma1_check(const ConvexFunction<double>& f, const Mat& S, const Vec& zeta, const Vec& w,
                                      const Lemma1Options& options, const Tolerances& tol) {
  return lemma1_check(f, make_fiber<double>(S, zeta, tol.anchor, tol.rank), w, options);
}

}  // namespace cvx

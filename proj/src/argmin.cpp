#include "cvx/argmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cvx/errors.hpp"
#include "cvx/json_io.hpp"
#include "cvx/simplex.hpp"

namespace cvx {

PolyhedralDomain::PolyhedralDomain(Index dim, double box_radius, Mat G, Vec h)
    : dim_(dim), radius_(box_radius), G_(std::move(G)), h_(std::move(h)) {
  if (!(box_radius > 0.0) || !std::isfinite(box_radius)) {
    throw PreconditionViolation("PolyhedralDomain: box radius must be positive and finite");
  }
  if (G_.size() == 0) G_.resize(h_.size(), dim_);
  require_dims(dim_, G_.cols(), "PolyhedralDomain G");
  require_dims(G_.rows(), h_.size(), "PolyhedralDomain h");
  require_finite(G_, "PolyhedralDomain G");
  require_finite(h_, "PolyhedralDomain h");

  LinearProgram lp = LinearProgram::with_variables(dim_);
  lp.lower.setConstant(-radius_);
  lp.upper.setConstant(radius_);
  lp.ineq = G_;
  lp.ineq_rhs = h_;
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) throw InfeasibleDomain("PolyhedralDomain: no feasible point in the box");
  feasible_ = sol.z;
}

PolyhedralDomain PolyhedralDomain::box(Index dim, double box_radius) {
  return PolyhedralDomain(dim, box_radius, Mat(0, dim), Vec(0));
}

bool PolyhedralDomain::contains(const Vec& x, double tol) const {
  require_dims(dim_, x.size(), "PolyhedralDomain::contains");
  if (x.size() > 0 && x.cwiseAbs().maxCoeff() > radius_ + tol) return false;
  if (G_.rows() == 0) return true;
  return ((G_ * x - h_).array() <= tol).all();
}

Vec PolyhedralDomain::project(const Vec& x) const {
  require_dims(dim_, x.size(), "PolyhedralDomain::project");
  auto clamp = [&](const Vec& v) { return Vec(v.cwiseMax(-radius_).cwiseMin(radius_)); };
  if (G_.rows() == 0) return clamp(x);

  // Dykstra over the box and each halfspace.
  const Index sets = G_.rows() + 1;
  std::vector<Vec> increments(static_cast<std::size_t>(sets), Vec::Zero(dim_));
  Vec cur = x;
  for (int sweep = 0; sweep < 2000; ++sweep) {
    const Vec before = cur;
    for (Index s = 0; s < sets; ++s) {
      Vec& p = increments[static_cast<std::size_t>(s)];
      const Vec shifted = cur + p;
      Vec next;
      if (s == 0) {
        next = clamp(shifted);
      } else {
        const Vec g = G_.row(s - 1).transpose();
        const double excess = g.dot(shifted) - h_(s - 1);
        const double gg = g.squaredNorm();
        next = (excess > 0.0 && gg > 0.0) ? Vec(shifted - (excess / gg) * g) : shifted;
      }
      p = shifted - next;
      cur = std::move(next);
    }
    if ((cur - before).norm() <= 1e-15 * (1.0 + cur.norm())) break;
  }
  return cur;
}

double PolyhedralDomain::max_step(const Vec& x, const Vec& u) const {
  double t = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < dim_; ++j) {
    if (u(j) > 0.0) t = std::min(t, (radius_ - x(j)) / u(j));
    if (u(j) < 0.0) t = std::min(t, (-radius_ - x(j)) / u(j));
  }
  for (Index i = 0; i < G_.rows(); ++i) {
    const double rate = G_.row(i).dot(u);
    if (rate > 0.0) t = std::min(t, (h_(i) - G_.row(i).dot(x)) / rate);
  }
  return std::max(t, 0.0);
}

namespace {

bool max_affine_family(const ConvexFunction<double>& f) {
  if (f.is_max_affine()) return true;
  if (!f.is_sum()) return false;
  return std::all_of(f.as_sum().parts.begin(), f.as_sum().parts.end(), max_affine_family);
}

void collect_max_affine(const ConvexFunction<double>& f, std::vector<const MaxAffine<double>*>& out) {
  if (f.is_max_affine()) {
    out.push_back(&f.as_max_affine());
  } else {
    for (const auto& p : f.as_sum().parts) collect_max_affine(p, out);
  }
}

Vec minimize_by_lp(const ConvexFunction<double>& f, const PolyhedralDomain& C) {
  std::vector<const MaxAffine<double>*> parts;
  collect_max_affine(f, parts);
  const Index n = C.dim();
  const Index k = static_cast<Index>(parts.size());
  Index rows = C.inequalities();
  for (const auto* p : parts) rows += p->pieces();

  LinearProgram lp = LinearProgram::with_variables(n + k);
  lp.cost.tail(k).setOnes();
  lp.lower.head(n).setConstant(-C.box_radius());
  lp.upper.head(n).setConstant(C.box_radius());
  lp.ineq = Mat::Zero(rows, n + k);
  lp.ineq_rhs = Vec(rows);
  lp.ineq.topLeftCorner(C.inequalities(), n) = C.G();
  lp.ineq_rhs.head(C.inequalities()) = C.h();
  Index row = C.inequalities();
  for (Index j = 0; j < k; ++j) {
    const auto& ma = *parts[static_cast<std::size_t>(j)];
    const double bound =
        (ma.gradients().rowwise().lpNorm<1>() * C.box_radius() + ma.offsets().cwiseAbs()).maxCoeff() + 1.0;
    lp.lower(n + j) = -bound;
    lp.upper(n + j) = bound;
    for (Index i = 0; i < ma.pieces(); ++i, ++row) {
      lp.ineq.row(row).head(n) = ma.gradients().row(i);
      lp.ineq(row, n + j) = -1.0;
      lp.ineq_rhs(row) = -ma.offsets()(i);
    }
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) throw InfeasibleDomain("minimize_over: epigraph LP infeasible");
  return sol.z.head(n);
}

Vec minimize_by_subgradient(const ConvexFunction<double>& f, const PolyhedralDomain& C, const Vec& start,
                            int iterations) {
  Vec x = C.project(start);
  double best_value = evaluate(f, x);
  Vec best = x;
  const Vec g0 = subgradient(f, x);
  if (g0.norm() == 0.0) return best;
  const double c = C.box_radius() / g0.norm();
  Vec tail_sum = Vec::Zero(x.size());
  int tail_count = 0;
  for (int k = 1; k <= iterations; ++k) {
    const Vec g = subgradient(f, x);
    x = C.project(Vec(x - (c / std::sqrt(double(k))) * g));
    const double value = evaluate(f, x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
    if (k > iterations / 2) {
      tail_sum += x;
      ++tail_count;
    }
  }
  if (tail_count > 0) {
    const Vec avg = C.project(Vec(tail_sum / double(tail_count)));
    if (evaluate(f, avg) < best_value) best = avg;
  }
  return best;
}

}  // namespace

ArgminCertificate minimize_over(const ConvexFunction<double>& f, const PolyhedralDomain& C,
                                const ArgminOptions& opt) {
  require_dims(C.dim(), f.dim(), "minimize_over");
  ArgminCertificate cert;
  cert.tol = opt.tol;
  const bool lp = max_affine_family(f);
  cert.method = lp ? "epigraph-lp" : "projected-subgradient";
  cert.witness = lp ? minimize_by_lp(f, C) : minimize_by_subgradient(f, C, Vec::Zero(C.dim()), opt.iterations);
  cert.m = evaluate(f, cert.witness);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // One restart from an improving perturbation, then the final certificate.
  for (int round = 0; round < 2; ++round) {
    bool improved = false;
    Vec best = cert.witness;
    double best_value = cert.m;
    for (int p = 0; p < opt.perturbations && C.dim() > 0; ++p) {
      Vec u(C.dim());
      for (Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
      const double scale = 1e-2 * C.box_radius() * unit(rng);
      const Vec candidate = C.project(Vec(cert.witness + scale * u / std::max(u.norm(), 1e-12)));
      const double value = evaluate(f, candidate);
      if (value < cert.m - opt.tol) improved = true;
      if (value < best_value) {
        best_value = value;
        best = candidate;
      }
    }
    if (!improved) {
      cert.certified = true;
      break;
    }
    cert.witness = lp ? best : minimize_by_subgradient(f, C, best, opt.iterations);
    cert.m = evaluate(f, cert.witness);
  }
  return cert;
}

bool argmin_membership(const ConvexFunction<double>& f, const PolyhedralDomain& C, const ArgminCertificate& cert,
                       const Vec& x, double tol) {
  return C.contains(x, tol) && evaluate(f, x) <= cert.m + tol;
}

TrialRecord lemma3_check(const ConvexFunction<double>& f, const PolyhedralDomain& C, const Lemma3Options& opt) {
  TrialRecord trial;
  trial.instance = {{"function", to_json(f)}, {"domain", to_json(C)}};
  ArgminOptions aopt = opt.argmin;
  aopt.tol = opt.tol;
  aopt.seed = opt.seed ^ 0x9e3779b97f4a7c15ULL;
  const ArgminCertificate cert = minimize_over(f, C, aopt);

  CheckRecord certificate{"lemma3.certificate", true, cert.m, nlohmann::json::object()};
  certificate.pass = cert.certified && argmin_membership(f, C, cert, cert.witness, cert.tol);
  certificate.witness = {{"m", cert.m}, {"witness", vec_json(cert.witness)}, {"method", cert.method}};

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> coord(-C.box_radius(), C.box_radius());
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Vec> members{cert.witness};
  CheckRecord lower{"lemma3.lower_bound", true, std::numeric_limits<double>::infinity(), nlohmann::json::object()};
  int accepted = 0;
  for (int attempt = 0; accepted < opt.samples && attempt < 50 * opt.samples; ++attempt) {
    Vec x(C.dim());
    for (Index i = 0; i < x.size(); ++i) x(i) = coord(rng);
    if (!C.contains(x, 0.0)) continue;
    ++accepted;
    const double value = evaluate(f, x);
    if (value - cert.m < lower.gap) {
      lower.gap = value - cert.m;
      lower.witness = {{"x", vec_json(x)}, {"value", value}};
    }
    if (static_cast<int>(members.size()) < opt.max_members / 2 && argmin_membership(f, C, cert, x, opt.tol)) {
      members.push_back(x);
    }
  }
  if (!std::isfinite(lower.gap)) lower.gap = 0.0;
  lower.pass = lower.gap >= -1e-7;

  for (int s = 0; s < opt.line_searches && static_cast<int>(members.size()) < opt.max_members && C.dim() > 0; ++s) {
    Vec u(C.dim());
    for (Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
    u /= std::max(u.norm(), 1e-12);
    const double tmax = C.max_step(cert.witness, u);
    auto inside = [&](double t) { return evaluate(f, Vec(cert.witness + t * u)) <= cert.m + opt.tol; };
    double lo = 0.0;
    if (inside(tmax)) {
      lo = tmax;
    } else {
      double hi = tmax;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
      }
    }
    if (lo > 0.0) members.push_back(cert.witness + lo * u);
  }

  trial.checks.push_back(std::move(certificate));
  trial.checks.push_back(std::move(lower));

  const bool distinct = std::any_of(members.begin() + 1, members.end(), [&](const Vec& x) {
    return (x - cert.witness).norm() > opt.distinct_radius;
  });

  CheckRecord segment{"lemma3.segment", true, -std::numeric_limits<double>::infinity(), nlohmann::json::object()};
  const double seg_tol = 10.0 * opt.tol;
  std::size_t tested = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      for (int l = 1; l <= 9; ++l) {
        const double lambda = 0.1 * l;
        const Vec z = lambda * members[i] + (1.0 - lambda) * members[j];
        ++tested;
        const double excess = evaluate(f, z) - cert.m;
        if (excess > segment.gap) segment.gap = excess;
        if (!argmin_membership(f, C, cert, z, seg_tol) && segment.pass) {
          segment.pass = false;
          segment.witness = {{"x", vec_json(members[i])}, {"y", vec_json(members[j])}, {"lambda", lambda}};
        }
      }
    }
  }
  if (tested == 0) segment.gap = 0.0;
  if (segment.pass) segment.witness = {{"members", members.size()}, {"combinations", tested}};
  trial.checks.push_back(std::move(segment));

  trial.settle();
  if (!trial.failed() && !distinct) {
    trial.status = TrialStatus::skip;
    trial.note = "SkippedDegenerate: argmin set is numerically a singleton";
  }
  return trial;
}

}  // namespace cvx

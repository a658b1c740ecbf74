#include "cvx/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cvx/errors.hpp"
#include "cvx/json_io.hpp"
#include "cvx/oracle.hpp"

namespace cvx {


MarginalFunction::MarginalFunction(ConvexFunction<double> f, Mat S, double rank_tol)
    : f_(std::move(f)), S_(std::move(S)) {
  require_dims(f_.dim(), S_.rows(), "MarginalFunction: dim(f) vs rows(S)");
  require_finite(S_, "MarginalFunction S");
  domain_ = row_space<double>(S_, rank_tol);
  constraint_ = domain_.basis.transpose() * S_.transpose();
}

const char* to_string(WitnessStatus s) { return s == WitnessStatus::exact_lp ? "exact-LP" : "exact-KKT"; }

namespace {

void flatten(const ConvexFunction<double>& f, std::vector<const ConvexFunction<double>*>& leaves) {
  if (f.is_sum()) {
    for (const auto& part : f.as_sum().parts) flatten(part, leaves);
  } else {
    leaves.push_back(&f);
  }
}

enum class Family { max_affine, quadratic };

Family classify(const ConvexFunction<double>& f, std::vector<const ConvexFunction<double>*>& leaves) {
  flatten(f, leaves);
  bool any_affine = false;
  bool any_quadratic = false;
  for (const auto* leaf : leaves) (leaf->is_max_affine() ? any_affine : any_quadratic) = true;
  if (any_affine && any_quadratic) {
    throw UnsupportedFamily("marginal: sums mixing max-affine and quadratic parts have no exact inner solver");
  }
  return any_affine ? Family::max_affine : Family::quadratic;
}

Quadratic<double> combine_quadratics(const std::vector<const ConvexFunction<double>*>& leaves, Index d) {
  Mat Q = Mat::Zero(d, d);
  Vec c = Vec::Zero(d);
  double r0 = 0.0;
  for (const auto* leaf : leaves) {
    const auto& q = leaf->as_quadratic();
    Q += q.Q();
    c += q.c();
    r0 += q.r0();
  }
  return Quadratic<double>(std::move(Q), std::move(c), r0);
}

// min sum_k t_k  s.t.  a_i . r + b_i <= t_k for every piece i of part k,
//                      C r = y,  |r_j| <= R.
LpSolution solve_epigraph(const std::vector<const ConvexFunction<double>*>& leaves, const Mat& C, const Vec& y,
                          double radius, const SimplexOptions& simplex) {
  const Index d = C.cols();
  const Index parts = static_cast<Index>(leaves.size());
  Index rows = 0;
  for (const auto* leaf : leaves) rows += leaf->as_max_affine().pieces();

  LinearProgram lp = LinearProgram::with_variables(d + parts);
  lp.cost.tail(parts).setOnes();
  lp.ineq = Mat::Zero(rows, d + parts);
  lp.ineq_rhs = Vec(rows);
  lp.lower.head(d).setConstant(-radius);
  lp.upper.head(d).setConstant(radius);
  Index row = 0;
  for (Index k = 0; k < parts; ++k) {
    const auto& ma = leaves[static_cast<std::size_t>(k)]->as_max_affine();
    const double bound = (ma.gradients().rowwise().lpNorm<1>() * radius + ma.offsets().cwiseAbs()).maxCoeff() + 1.0;
    lp.lower(d + k) = -bound;
    lp.upper(d + k) = bound;
    for (Index i = 0; i < ma.pieces(); ++i, ++row) {
      lp.ineq.row(row).head(d) = ma.gradients().row(i);
      lp.ineq(row, d + k) = -1.0;
      lp.ineq_rhs(row) = -ma.offsets()(i);
    }
  }
  lp.eq = Mat::Zero(C.rows(), d + parts);
  lp.eq.leftCols(d) = C;
  lp.eq_rhs = y;
  return solve_lp(lp, simplex);
}

MinimizationWitness solve_lp_marginal(const MarginalFunction& h, const std::vector<const ConvexFunction<double>*>& leaves,
                                      const Vec& y, const MarginalOptions& opt) {
  const Index d = h.r_dim();
  auto run = [&](double radius) {
    const LpSolution sol = solve_epigraph(leaves, h.constraint(), y, radius, opt.simplex);
    if (sol.status != LpStatus::optimal) {
      throw DomainViolation("marginal: fiber is empty inside the bounding box");
    }
    return sol;
  };
  const LpSolution first = run(opt.box_radius);
  MinimizationWitness w;
  w.argmin = first.z.head(d);
  w.status = WitnessStatus::exact_lp;
  if (d > 0 && w.argmin.cwiseAbs().maxCoeff() >= opt.box_radius * (1.0 - 1e-9)) {
    const LpSolution wider = run(2.0 * opt.box_radius);
    if (wider.objective < first.objective - 1e-8 * (1.0 + std::abs(first.objective))) {
      throw UnboundedBelow("marginal: inner minimum not attained (objective keeps decreasing as the box grows)");
    }
    w.box_active = true;
  }
  w.value = evaluate(h.f(), w.argmin);
  return w;
}

// Null-space solve of the KKT system: r = r_p + N z with C r_p = y and
// N spanning ker(C); the reduced Hessian N^T Q N must be positive definite.
MinimizationWitness solve_kkt_marginal(const MarginalFunction& h, const Quadratic<double>& q, const Vec& y,
                                       const MarginalOptions& opt) {
  const Mat& C = h.constraint();
  const Vec particular = solve_anchor<double>(C, y, 1e-8 * std::max(1.0, y.norm()));
  const Subspace<double> null = kernel<double>(C);
  Vec r = particular;
  if (!null.is_zero()) {
    const Mat reduced = null.basis.transpose() * q.Q() * null.basis;
    const double floor = Eigen::SelfAdjointEigenSolver<Mat>(reduced, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (floor <= opt.singular_tol * (1.0 + q.Q().cwiseAbs().maxCoeff())) {
      throw SingularKKT("marginal: Q is not positive definite on the constraint null space");
    }
    const Vec rhs = -0.5 * null.basis.transpose() * q.gradient(particular);
    r += null.basis * reduced.llt().solve(rhs);
  }
  MinimizationWitness w;
  w.argmin = std::move(r);
  w.value = evaluate(h.f(), w.argmin);
  w.status = WitnessStatus::exact_kkt;
  return w;
}

bool quadratic_family(const ConvexFunction<double>& f) {
  std::vector<const ConvexFunction<double>*> leaves;
  flatten(f, leaves);
  return std::none_of(leaves.begin(), leaves.end(), [](const auto* leaf) { return leaf->is_max_affine(); });
}

}  // namespace

MinimizationWitness marginal_value(const MarginalFunction& h, const Vec& x, const MarginalOptions& opt) {
  require_dims(h.x_dim(), x.size(), "marginal_value");
  require_finite(x, "marginal_value");
  const Vec y = h.domain().basis.transpose() * x;
  const double off = (x - h.domain().basis * y).norm();
  if (off > opt.domain_tol * std::max(1.0, x.norm())) {
    throw DomainViolation("marginal: x is not in Im(S^T) (distance " + std::to_string(off) + ")");
  }
  std::vector<const ConvexFunction<double>*> leaves;
  if (classify(h.f(), leaves) == Family::max_affine) return solve_lp_marginal(h, leaves, y, opt);
  return solve_kkt_marginal(h, combine_quadratics(leaves, h.r_dim()), y, opt);
}

double midpoint_convexity_gap(const MarginalFunction& h, const Vec& x, const Vec& y, const MarginalOptions& opt) {
  const double hx = marginal_value(h, x, opt).value;
  const double hy = marginal_value(h, y, opt).value;
  const double hm = marginal_value(h, Vec(0.5 * (x + y)), opt).value;
  return 0.5 * (hx + hy) - hm;
}

bool strictly_convex(const ConvexFunction<double>& f, double floor) {
  std::vector<const ConvexFunction<double>*> leaves;
  flatten(f, leaves);
  for (const auto* leaf : leaves)
    if (leaf->is_max_affine()) return false;
  return combine_quadratics(leaves, f.dim()).positive_definite(floor);
}

StrictnessReport strict_convexity_certificate(const MarginalFunction& h, const std::vector<std::pair<Vec, Vec>>& pairs,
                                              double tol, const MarginalOptions& opt) {
  if (!strictly_convex(h.f())) throw NotStrictlyConvex("strict_convexity_certificate: f is not strictly convex");
  for (const auto& [x, y] : pairs) {
    if ((x - y).norm() < 1e-3) throw PreconditionViolation("strict_convexity_certificate: pair closer than 1e-3");
  }
  StrictnessReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    const double hx = marginal_value(h, x, opt).value;
    const double hy = marginal_value(h, y, opt).value;
    const double hm = marginal_value(h, Vec(0.5 * (x + y)), opt).value;
    scale = std::max({scale, std::abs(hx), std::abs(hy), std::abs(hm)});
    const double gap = 0.5 * (hx + hy) - hm;
    if (gap < rep.min_gap) {
      rep.min_gap = gap;
      rep.witness_index = i;
    }
  }
  rep.threshold = tol * (1.0 + scale);
  rep.pass = pairs.empty() || rep.min_gap > rep.threshold;
  return rep;
}

Mat marginal_hessian(const MarginalFunction& h) {
  std::vector<const ConvexFunction<double>*> leaves;
  if (classify(h.f(), leaves) != Family::quadratic) {
    throw UnsupportedFamily("marginal_hessian: f must be quadratic");
  }
  const Quadratic<double> q = combine_quadratics(leaves, h.r_dim());
  const Mat& C = h.constraint();
  const Index d = C.cols();
  const Index k = C.rows();
  Mat kkt = Mat::Zero(d + k, d + k);
  kkt.topLeftCorner(d, d) = 2.0 * q.Q();
  kkt.topRightCorner(d, k) = C.transpose();
  kkt.bottomLeftCorner(k, d) = C;
  Eigen::FullPivLU<Mat> lu(kkt);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) throw SingularKKT("marginal_hessian: KKT matrix is singular");
  const Mat inverse = lu.inverse();
  const Mat H = -inverse.bottomRightCorner(k, k);
  return 0.5 * (H + H.transpose());
}

TrialRecord lemma2_check(const ConvexFunction<double>& f, const Mat& S, const Lemma2Options& opt) {
  TrialRecord trial;
  trial.instance = {{"marginal", {{"f", to_json(f)}, {"S", mat_json(S)}}}};
  const MarginalFunction h(f, S, opt.tol.rank);
  MarginalOptions mopt = opt.marginal;
  mopt.box_radius = opt.tol.box_radius;
  mopt.domain_tol = opt.tol.domain;
  const MarginalSolver solver =
      opt.solver ? opt.solver : [&](const MarginalFunction& m, const Vec& x) { return marginal_value(m, x, mopt); };

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-opt.sample_radius, opt.sample_radius);
  auto sample = [&] {
    Vec r(h.r_dim());
    for (Index i = 0; i < r.size(); ++i) r(i) = unif(rng);
    return Vec(S.transpose() * r);
  };

  CheckRecord witness{"lemma2.witness", true, 0.0, nlohmann::json::object()};
  auto solve = [&](const Vec& x) {
    const MinimizationWitness w = solver(h, x);
    const double feas = (S.transpose() * w.argmin - x).norm();
    const double consistency = std::abs(evaluate(f, w.argmin) - w.value);
    if (feas > opt.tol.feasibility || consistency > 1e-8) {
      witness.pass = false;
      if (witness.witness.empty()) witness.witness = {{"x", vec_json(x)}, {"argmin", vec_json(w.argmin)}};
    }
    witness.gap = std::max({witness.gap, feas, consistency});
    return w;
  };

  const bool quadratic = quadratic_family(f);
  const bool strict = strictly_convex(f);
  Mat hessian;
  CheckRecord convexity{"lemma2.convexity", true, std::numeric_limits<double>::infinity(), nlohmann::json::object()};
  CheckRecord strictness{"lemma2.strictness", true, std::numeric_limits<double>::infinity(), nlohmann::json::object()};
  CheckRecord closed_form{"lemma2.closed_form", true, 0.0, nlohmann::json::object()};
  std::vector<double> values;
  try {
    if (quadratic) hessian = marginal_hessian(h);
    for (int p = 0; p < opt.pairs; ++p) {
      const Vec x = sample();
      const Vec y = sample();
      const double hx = solve(x).value;
      const double hy = solve(y).value;
      const double hm = solve(Vec(0.5 * (x + y))).value;
      const double gap = 0.5 * (hx + hy) - hm;
      if (gap < convexity.gap) {
        convexity.gap = gap;
        convexity.witness = {{"x", vec_json(x)}, {"y", vec_json(y)}, {"values", {hx, hy, hm}}};
      }
      if (strict && (x - y).norm() >= 1e-3 && gap < strictness.gap) {
        strictness.gap = gap;
        strictness.witness = {{"x", vec_json(x)}, {"y", vec_json(y)}};
      }
      if (quadratic) {
        const Vec dy = h.domain().basis.transpose() * (x - y);
        const double predicted = dy.dot(hessian * dy) / 8.0;
        const double dev = std::abs(gap - predicted);
        if (dev > closed_form.gap) {
          closed_form.gap = dev;
          closed_form.witness = {{"x", vec_json(x)}, {"y", vec_json(y)}, {"gap", gap}, {"predicted", predicted}};
        }
        if (dev > 1e-7 * (1.0 + std::abs(predicted))) closed_form.pass = false;
      }
    }
  } catch (const Error& e) {
    trial.checks.push_back({"lemma2.solve", false, 0.0, {{"error", e.what()}}});
    trial.settle();
    return trial;
  }
  if (opt.pairs == 0) convexity.gap = 0.0;
  convexity.pass = convexity.gap >= -opt.tol.marginal_gap;
  trial.checks.push_back(std::move(witness));
  trial.checks.push_back(std::move(convexity));
  if (strict) {
    if (!std::isfinite(strictness.gap)) strictness.gap = 0.0;
    strictness.pass = strictness.witness.empty() || strictness.gap >= opt.tol.strict_gap;
    trial.checks.push_back(std::move(strictness));
  }
  if (quadratic) {
    CheckRecord psd{"lemma2.hessian_psd", true, 0.0, nlohmann::json::object()};
    psd.gap = hessian.size() == 0
                  ? 0.0
                  : Eigen::SelfAdjointEigenSolver<Mat>(hessian, Eigen::EigenvaluesOnly).eigenvalues()(0);
    psd.pass = psd.gap >= -1e-8;
    trial.checks.push_back(std::move(psd));
    trial.checks.push_back(std::move(closed_form));
  }
  if (opt.oracle) {
    CheckRecord oracle{"lemma2.oracle", true, 0.0, nlohmann::json::object()};
    const Vec x = sample();
    try {
      const MinimizationWitness w = solve(x);
      const double grid = brute_force_min_over_fiber(f, S, x, opt.oracle_pitch, opt.oracle_radius);
      oracle.gap = std::abs(w.value - grid);
      oracle.pass = oracle.gap <= opt.oracle_tol;
      oracle.witness = {{"x", vec_json(x)}, {"marginal", w.value}, {"grid", grid}, {"pitch", opt.oracle_pitch}};
    } catch (const Error& e) {
      oracle.pass = false;
      oracle.witness = {{"error", e.what()}};
    }
    trial.checks.push_back(std::move(oracle));
  }
  trial.settle();
  return trial;
}

}  // namespace cvx

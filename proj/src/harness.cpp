#include "cvx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <thread>
#include <vector>

#include "cvx/argmin.hpp"
#include "cvx/errors.hpp"
#include "cvx/generators.hpp"
#include "cvx/json_io.hpp"
#include "cvx/restriction.hpp"

namespace cvx {

namespace {

constexpr std::uint64_t kLemma1Stream = 1;
constexpr std::uint64_t kLemma2Stream = 2;
constexpr std::uint64_t kLemma3Stream = 3;

Index draw(std::mt19937_64& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

Vec uniform_vec(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

std::string trial_id(SuiteId s, std::size_t index) { return std::string(to_string(s)) + "/" + std::to_string(index); }

template <typename Fn>
TrialRecord guarded(SuiteId s, std::size_t index, Fn&& fn) {
  TrialRecord rec;
  try {
    rec = fn();
  } catch (const std::exception& e) {
    rec.checks.push_back({"trial.error", false, 0.0, {{"error", e.what()}}});
    rec.status = TrialStatus::fail;
  }
  rec.id = trial_id(s, index);
  return rec;
}

std::vector<TrialRecord> run_trials(SuiteId s, const SuiteConfig& config,
                                    TrialRecord (*trial)(const SuiteConfig&, std::size_t)) {
  std::vector<TrialRecord> out(config.trials);
  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(config.trials, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      out[i] = guarded(s, i, [&] { return trial(config, i); });
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

}  // namespace

const char* to_string(SuiteId s) {
  switch (s) {
    case SuiteId::lemma1: return "lemma1";
    case SuiteId::lemma2: return "lemma2";
    case SuiteId::lemma3: return "lemma3";
    case SuiteId::all: return "all";
  }
  return "unknown";
}

const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::none: return "none";
    case Mutation::row_space_projection: return "row-space-projection";
    case Mutation::suboptimal_witness: return "suboptimal-witness";
  }
  return "unknown";
}

std::optional<SuiteId> parse_suite(const std::string& s) {
  for (SuiteId id : {SuiteId::lemma1, SuiteId::lemma2, SuiteId::lemma3, SuiteId::all})
    if (s == to_string(id)) return id;
  return std::nullopt;
}

std::optional<Mutation> parse_mutation(const std::string& s) {
  for (Mutation m : {Mutation::none, Mutation::row_space_projection, Mutation::suboptimal_witness})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

MinimizationWitness suboptimal_marginal(const MarginalFunction& h, const Vec& x, const MarginalOptions& options) {
  MinimizationWitness w = marginal_value(h, x, options);
  const Subspace<double> along = kernel<double>(h.constraint());
  if (along.is_zero()) return w;
  w.argmin += along.basis.col(0);
  w.value = evaluate(h.f(), w.argmin);
  return w;
}

// Max-affine f on R^n, S : R^n -> R^d of rank 1..n-1, zeta = S p. The point
// embed(w) is turned into a kink by lifting up to three pieces so they tie
// with the maximum there.
TrialRecord lemma1_trial(const SuiteConfig& config, std::size_t index) {
  std::mt19937_64 rng(split_seed(config.seed, kLemma1Stream, index));
  const Index n = draw(rng, 2, std::max(2, config.max_dim));
  const Index pieces = draw(rng, 2, 12);
  const Index rank = draw(rng, 1, n - 1);
  const Index d = draw(rng, rank, std::max<Index>(rank, config.max_dim));
  const Mat S = gen_operator(d, n, rank, rng());
  const ConvexFunction<double> base = gen_max_affine(n, pieces, rng());
  const Vec zeta = S * uniform_vec(rng, n, -2.0, 2.0);
  const AffineFiber<double> fiber = make_fiber<double>(S, zeta, config.tol.anchor, config.tol.rank);
  const Vec w = uniform_vec(rng, fiber.coordinate_dim(), -1.0, 1.0);
  const Vec x = fiber.embed(w);

  const auto& ma = base.as_max_affine();
  Vec offsets = ma.offsets();
  const Vec values = ma.piece_values(x);
  const double top = values.maxCoeff();
  std::vector<Index> order(static_cast<std::size_t>(pieces));
  for (Index i = 0; i < pieces; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const Index ties = draw(rng, 1, std::min<Index>(3, pieces));
  for (Index t = 0; t < ties; ++t) {
    const Index i = order[static_cast<std::size_t>(t)];
    offsets(i) += top - values(i);
  }
  const ConvexFunction<double> f = MaxAffine<double>(ma.gradients(), offsets);

  Lemma1Options opt;
  opt.active_tol = config.tol.active;
  opt.support_tol = config.tol.support;
  opt.convexity_slack = config.tol.convexity;
  opt.seed = rng();
  opt.project_onto_row_space = config.mutation == Mutation::row_space_projection;

  TrialRecord rec;
  rec.instance = {{"function", to_json(f)}, {"S", mat_json(S)}, {"zeta", vec_json(zeta)}, {"w", vec_json(w)},
                  {"x", vec_json(x)},       {"kink_pieces", ties}};
  rec.checks = lemma1_check(f, fiber, w, opt);
  rec.settle();
  return rec;
}

TrialRecord lemma2_trial(const SuiteConfig& config, std::size_t index) {
  std::mt19937_64 rng(split_seed(config.seed, kLemma2Stream, index));
  bool affine = false;
  switch (config.lemma2_family) {
    case Lemma2Family::mixed: affine = index % 2 == 0; break;
    case Lemma2Family::max_affine: affine = true; break;
    case Lemma2Family::quadratic: affine = false; break;
  }
  const int max_dim = std::max(1, config.max_dim);
  Index d = 0, n = 0, rank = 0;
  if (config.lemma2_oracle_mode) {
    // Fiber dimension k = d - rank cycles through 1..3 with d <= 4.
    const Index k = 1 + static_cast<Index>(index % 3);
    d = draw(rng, k + 1, std::max<Index>(k + 1, std::min<Index>(4, max_dim)));
    rank = d - k;
    n = draw(rng, rank, std::max<Index>(rank, max_dim));
  } else {
    d = draw(rng, 1, max_dim);
    n = draw(rng, 1, max_dim);
    rank = draw(rng, 1, std::min(d, n));
  }
  const Mat S = gen_operator(d, n, rank, rng());
  const Index pieces = draw(rng, 2, 12);
  const ConvexFunction<double> f = affine ? gen_coercive_max_affine(d, pieces, rng()) : gen_pd_quadratic(d, rng());

  Lemma2Options opt;
  opt.seed = rng();
  opt.tol = config.tol;
  opt.sample_radius = config.lemma2_oracle_mode ? 0.5 : 1.0;
  opt.oracle = config.lemma2_oracle_mode || (d - rank) <= config.oracle_max_fiber_dim;
  if (config.mutation == Mutation::suboptimal_witness) {
    MarginalOptions mopt;
    mopt.box_radius = config.tol.box_radius;
    mopt.domain_tol = config.tol.domain;
    opt.solver = [mopt](const MarginalFunction& h, const Vec& x) { return suboptimal_marginal(h, x, mopt); };
  }
  TrialRecord rec = lemma2_check(f, S, opt);
  rec.instance["fiber_dim"] = d - rank;
  return rec;
}

// Box domains (sometimes cut by halfspaces through which the origin stays
// feasible) with a flat-bottomed max-affine, a PD quadratic (singleton
// argmin) or a rank-deficient PSD quadratic, cycling by trial index.
TrialRecord lemma3_trial(const SuiteConfig& config, std::size_t index) {
  std::mt19937_64 rng(split_seed(config.seed, kLemma3Stream, index));
  const Index dim = draw(rng, 1, std::max(1, std::min(4, config.max_dim)));
  const double radius = std::uniform_real_distribution<double>(2.0, 4.0)(rng);
  const Index cuts = draw(rng, 0, 5) < 2 ? draw(rng, 1, 2) : 0;
  Mat G(cuts, dim);
  Vec h(cuts);
  for (Index i = 0; i < cuts; ++i) {
    G.row(i) = uniform_vec(rng, dim, -1.0, 1.0).transpose();
    h(i) = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
  }
  const PolyhedralDomain C(dim, radius, G, h);
  const std::uint64_t fseed = rng();
  ConvexFunction<double> f = [&]() -> ConvexFunction<double> {
    switch (index % 3) {
      case 0: return gen_flat_bottom_max_affine(dim, draw(rng, 1, 8), fseed);
      case 1: return gen_pd_quadratic(dim, fseed);
      default: return gen_psd_quadratic(dim, draw(rng, 0, dim - 1), fseed);
    }
  }();
  Lemma3Options opt;
  opt.tol = config.tol.membership;
  opt.seed = rng();
  return lemma3_check(f, C, opt);
}

SuiteReport run_suite(SuiteId which, const SuiteConfig& config) {
  SuiteReport report;
  report.suite = to_string(which);
  report.seed = config.seed;
  report.tolerances = config.tol;
  auto add = [&](SuiteId s, TrialRecord (*trial)(const SuiteConfig&, std::size_t)) {
    auto records = run_trials(s, config, trial);
    report.trials.insert(report.trials.end(), std::make_move_iterator(records.begin()),
                         std::make_move_iterator(records.end()));
  };
  if (which == SuiteId::lemma1 || which == SuiteId::all) add(SuiteId::lemma1, lemma1_trial);
  if (which == SuiteId::lemma2 || which == SuiteId::all) add(SuiteId::lemma2, lemma2_trial);
  if (which == SuiteId::lemma3 || which == SuiteId::all) add(SuiteId::lemma3, lemma3_trial);
  return report;
}

}  // namespace cvx

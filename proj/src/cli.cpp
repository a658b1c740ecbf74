#include "cvx/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cvx/argmin.hpp"
#include "cvx/errors.hpp"
#include "cvx/json_io.hpp"
#include "cvx/marginal.hpp"
#include "cvx/report.hpp"
#include "cvx/restriction.hpp"

namespace cvx {

namespace {

using nlohmann::json;

const std::map<std::string, QueryKind> kQueryKinds = {
    {"subdiff", QueryKind::subdiff},
    {"restricted-subdiff", QueryKind::restricted_subdiff},
    {"marginal", QueryKind::marginal},
    {"argmin-member", QueryKind::argmin_member},
};

struct RawArgs {
  std::string suite = "all";
  long long trials = 100;
  std::string mutation = "none";
  std::string format = "json";
  std::string kind;
  std::string instance;
  std::string x;
};

void add_tolerances(CLI::App& app, CliConfig& cfg) {
  app.add_option("--tol-active", cfg.tol.active, "Active-piece tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tol-support", cfg.tol.support, "Support-function equality tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tol-membership", cfg.tol.membership, "Argmin membership tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct Apps {
  CLI::App app{"Convex-analysis verification toolkit", "cvxverify"};
  CLI::App* verify = nullptr;
  CLI::App* query = nullptr;
};

// Both subcommands carry their own flags; with no subcommand the program runs
// `verify` with defaults.
void build(Apps& a, CliConfig& cfg, RawArgs& raw) {
  a.app.require_subcommand(0, 1);
  a.verify = a.app.add_subcommand("verify", "Run the property suites and write a report");
  a.verify->add_option("--suite", raw.suite, "Suite to run")
      ->check(CLI::IsMember({"lemma1", "lemma2", "lemma3", "all"}))
      ->capture_default_str();
  a.verify->add_option("--trials", raw.trials, "Trials per suite")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  a.verify->add_option("--dim", cfg.dim, "Maximum instance dimension")->check(CLI::Range(2, 16))->capture_default_str();
  a.verify->add_option("--seed", cfg.seed, "Global seed")->capture_default_str();
  add_tolerances(*a.verify, cfg);
  a.verify->add_option("--mutation", raw.mutation, "Deliberately broken fixture (self-test of the checks)")
      ->check(CLI::IsMember({"none", "row-space-projection", "suboptimal-witness"}))
      ->capture_default_str();
  a.verify->add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
  a.verify->add_option("--out", cfg.out, "Report path (default report.json or report.csv)");
  a.verify->add_option("--format", raw.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  a.query = a.app.add_subcommand("query", "Evaluate one operation on an instance file");
  a.query->add_option("kind", raw.kind, "subdiff | restricted-subdiff | marginal | argmin-member")
      ->required()
      ->check(CLI::IsMember({"subdiff", "restricted-subdiff", "marginal", "argmin-member"}));
  a.query->add_option("--instance", raw.instance, "Instance JSON file")->required();
  a.query->add_option("--x", raw.x, "Point as comma-separated floats")->required();
  add_tolerances(*a.query, cfg);
  a.query->add_option("--out", cfg.out, "Result path (default standard output)");
  a.query->add_option("--format", raw.format, "Result format")->check(CLI::IsMember({"json"}))->capture_default_str();
}

json read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open instance file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed instance JSON in " + path + ": " + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw PreconditionViolation(std::string("instance: missing \"") + key + "\"");
  return j.at(key);
}

bool write_text(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (f) f << text;
  if (!f) {
    err << "cvxverify: cannot write " << path << "\n";
    return false;
  }
  return true;
}

int run_verify(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  SuiteConfig sc;
  sc.trials = cfg.trials;
  sc.seed = cfg.seed;
  sc.max_dim = cfg.dim;
  sc.tol = cfg.tol;
  sc.mutation = cfg.mutation;
  sc.threads = cfg.threads;
  const SuiteReport report = run_suite(cfg.suite, sc);

  const bool csv = cfg.format == OutputFormat::csv;
  const std::string path = cfg.out.empty() ? (csv ? "report.csv" : "report.json") : cfg.out;
  if (!write_text(path, csv ? report_csv(report) : report_json(report), err)) return 2;

  std::map<std::string, Summary> per_suite;
  for (const auto& t : report.trials) {
    Summary& s = per_suite[t.id.substr(0, t.id.find('/'))];
    switch (t.status) {
      case TrialStatus::pass: ++s.pass; break;
      case TrialStatus::fail: ++s.fail; break;
      case TrialStatus::skip: ++s.skip; break;
    }
  }
  for (const auto& [name, s] : per_suite)
    out << name << ": " << s.pass << " pass, " << s.fail << " fail, " << s.skip << " skip\n";
  const Summary total = report.summary();
  out << "total: " << total.pass << " pass, " << total.fail << " fail, " << total.skip << " skip\n";
  out << "report: " << path << "\n";
  return report.all_passed() ? 0 : 1;
}

int run_query(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.instance || !cfg.x) {
    err << "cvxverify: query needs --instance and --x\n";
    return 2;
  }
  json inst;
  try {
    inst = read_instance(*cfg.instance);
  } catch (const UsageError& e) {
    err << "cvxverify: " << e.what() << "\n";
    return 2;
  }
  const Vec& x = *cfg.x;

  json result;
  try {
    switch (cfg.query) {
      case QueryKind::subdiff: {
        const auto f = function_from_json(field(inst, "function"));
        require_dims(f.dim(), x.size(), "--x");
        result = {{"query", "subdiff"},
                  {"x", vec_json(x)},
                  {"value", evaluate(f, x)},
                  {"subdifferential", to_json(subdifferential(f, x, cfg.tol.active))}};
        break;
      }
      case QueryKind::restricted_subdiff: {
        const auto f = function_from_json(field(inst, "function"));
        const Mat S = mat_from_json(field(inst, "S"));
        const Vec zeta = vec_from_json(field(inst, "zeta"));
        require_dims(f.dim(), S.cols(), "operator columns");
        require_dims(f.dim(), x.size(), "--x");
        const auto fiber = make_fiber<double>(S, zeta, cfg.tol.anchor, cfg.tol.rank);
        if (!fiber.contains(x, cfg.tol.feasibility)) throw DomainViolation("--x is not on the fiber S y = zeta");
        const RestrictedFunction<double> g(f, fiber);
        const Vec w = fiber.coordinates(x);
        result = {{"query", "restricted-subdiff"},
                  {"x", vec_json(x)},
                  {"w", vec_json(w)},
                  {"kernel_basis", mat_json(fiber.kernel.basis)},
                  {"restricted_subdifferential", to_json(restricted_subdifferential(g, w, cfg.tol.active))}};
        break;
      }
      case QueryKind::marginal: {
        const json& block = inst.contains("marginal") ? inst.at("marginal") : inst;
        const auto f = function_from_json(block.contains("f") ? block.at("f") : field(block, "function"));
        const Mat S = mat_from_json(field(block, "S"));
        require_dims(f.dim(), S.rows(), "operator rows");
        const MarginalFunction h(f, S, cfg.tol.rank);
        require_dims(h.x_dim(), x.size(), "--x");
        MarginalOptions mopt;
        mopt.box_radius = cfg.tol.box_radius;
        mopt.domain_tol = cfg.tol.domain;
        const MinimizationWitness w = marginal_value(h, x, mopt);
        result = {{"query", "marginal"},      {"x", vec_json(x)},
                  {"value", w.value},         {"argmin", vec_json(w.argmin)},
                  {"status", to_string(w.status)}, {"box_active", w.box_active}};
        break;
      }
      case QueryKind::argmin_member: {
        const auto f = function_from_json(field(inst, "function"));
        require_dims(f.dim(), x.size(), "--x");
        const PolyhedralDomain C = inst.contains("domain") ? domain_from_json(inst.at("domain"), f.dim())
                                                           : PolyhedralDomain(f.dim(), cfg.tol.box_radius, Mat(0, f.dim()), Vec(0));
        ArgminOptions aopt;
        aopt.tol = cfg.tol.membership;
        const ArgminCertificate cert = minimize_over(f, C, aopt);
        result = {{"query", "argmin-member"},
                  {"x", vec_json(x)},
                  {"min_value", cert.m},
                  {"witness", vec_json(cert.witness)},
                  {"certified", cert.certified},
                  {"method", cert.method},
                  {"member", argmin_membership(f, C, cert, x, cfg.tol.membership)}};
        break;
      }
    }
  } catch (const PreconditionViolation& e) {
    err << "cvxverify: invalid instance: " << e.what() << "\n";
    return 2;
  } catch (const DimensionMismatch& e) {
    err << "cvxverify: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "cvxverify: query failed: " << e.what() << "\n";
    return 1;
  }

  const std::string text = result.dump(2) + "\n";
  if (cfg.out.empty()) {
    out << text;
  } else if (!write_text(cfg.out, text, err)) {
    return 2;
  }
  return 0;
}

}  // namespace

Vec parse_csv_floats(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw UsageError("--x: empty entry in \"" + text + "\"");
    item = item.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) throw UsageError("--x: not a finite number: \"" + item + "\"");
    values.push_back(v);
  }
  if (values.empty() || text.back() == ',') throw UsageError("--x: expected comma-separated floats");
  return Eigen::Map<const Vec>(values.data(), static_cast<Index>(values.size()));
}

CliConfig parse_args(const std::vector<std::string>& argv) {
  CliConfig cfg;
  RawArgs raw;
  Apps a;
  build(a, cfg, raw);
  std::vector<const char*> ptrs;
  for (const auto& s : argv) ptrs.push_back(s.c_str());
  try {
    a.app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::CallForHelp&) {
    cfg.help = true;
    return cfg;
  } catch (const CLI::CallForAllHelp&) {
    cfg.help = true;
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  cfg.command = a.query->parsed() ? Command::query : Command::verify;
  cfg.suite = *parse_suite(raw.suite);
  cfg.trials = static_cast<std::size_t>(raw.trials);
  cfg.mutation = *parse_mutation(raw.mutation);
  cfg.format = raw.format == "csv" ? OutputFormat::csv : OutputFormat::json;
  if (cfg.command == Command::query) {
    cfg.query = kQueryKinds.at(raw.kind);
    cfg.instance = raw.instance;
    cfg.x = parse_csv_floats(raw.x);
  }
  return cfg;
}

std::string help_text() {
  CliConfig cfg;
  RawArgs raw;
  Apps a;
  build(a, cfg, raw);
  std::string text = a.app.help();
  text += "\n" + a.verify->help("cvxverify");
  text += "\n" + a.query->help("cvxverify");
  text +=
      "\nInstance files are JSON objects with the blocks the query needs:\n"
      "  \"function\": {\"type\":\"max_affine\",\"pieces\":[{\"a\":[...],\"b\":0}]}\n"
      "              {\"type\":\"quadratic\",\"Q\":[[...]],\"c\":[...],\"r0\":0}\n"
      "              {\"type\":\"sum\",\"parts\":[...]}\n"
      "  \"S\": [[...]], \"zeta\": [...]           (restricted-subdiff)\n"
      "  \"marginal\": {\"f\": <function>, \"S\": [[...]]}   (marginal: h(x) = min f(r) over S^T r = x)\n"
      "  \"domain\": {\"inequalities\":[{\"g\":[...],\"h\":0}],\"box_radius\":R}   (argmin-member)\n"
      "\nExit status: 0 all checks passed or query succeeded, 1 check or query failure, 2 usage or IO error.\n";
  return text;
}

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.help) {
    out << help_text();
    return 0;
  }
  return config.command == Command::query ? run_query(config, out, err) : run_verify(config, out, err);
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  CliConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const UsageError& e) {
    std::cerr << "cvxverify: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }
  return run(cfg, std::cout, std::cerr);
}

}  // namespace cvx

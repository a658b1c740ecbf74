#pragma once

// Command-line front end: `verify` runs the property suites and writes a
// report, `query` evaluates one operation on an instance file.
//
// Exit status: 0 all checks passed (or the query succeeded), 1 a check or the
// query's computation failed, 2 usage or IO error.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvx/harness.hpp"
#include "cvx/linalg.hpp"
#include "cvx/tolerances.hpp"

namespace cvx {

enum class Command { verify, query };
enum class QueryKind { subdiff, restricted_subdiff, marginal, argmin_member };
enum class OutputFormat { json, csv };

struct CliConfig {
  Command command = Command::verify;
  SuiteId suite = SuiteId::all;
  std::size_t trials = 100;
  int dim = 6;
  std::uint64_t seed = 42;
  Tolerances tol;
  Mutation mutation = Mutation::none;
  unsigned threads = 0;
  QueryKind query = QueryKind::subdiff;
  std::optional<std::string> instance;
  std::optional<Vec> x;
  /// Empty means report.json / report.csv for verify, standard output for query.
  std::string out;
  OutputFormat format = OutputFormat::json;
  bool help = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// argv[0] is the program name. Throws UsageError.
CliConfig parse_args(const std::vector<std::string>& argv);

/// Comma-separated floats; throws UsageError on anything else.
Vec parse_csv_floats(const std::string& text);

std::string help_text();

int run(const CliConfig& config, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv);

}  // namespace cvx

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvx/tolerances.hpp"

namespace cvx {

/// One verified property within a trial. `gap` is the check's measured
/// margin (see each check for its meaning); `witness` holds the values needed
/// to replay it.
struct CheckRecord {
  std::string name;
  bool pass = true;
  double gap = 0.0;
  nlohmann::json witness = nlohmann::json::object();
};

enum class TrialStatus { pass, fail, skip };

struct TrialRecord {
  std::string id;
  nlohmann::json instance = nlohmann::json::object();
  std::vector<CheckRecord> checks;
  TrialStatus status = TrialStatus::pass;
  std::string note;

  // pass iff every check passed; skip is set explicitly by the caller.
  void settle() {
    if (status == TrialStatus::skip) return;
    status = TrialStatus::pass;
    for (const auto& c : checks)
      if (!c.pass) status = TrialStatus::fail;
  }
  bool failed() const { return status == TrialStatus::fail; }
};

struct Summary {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t skip = 0;
  std::size_t total() const { return pass + fail + skip; }
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  std::vector<TrialRecord> trials;

  Summary summary() const;
  bool all_passed() const { return summary().fail == 0; }
  void append(const SuiteReport& other);
};

const char* to_string(TrialStatus s);

nlohmann::json to_json(const CheckRecord& c);
nlohmann::json to_json(const TrialRecord& t);
nlohmann::json to_json(const SuiteReport& r);
nlohmann::json to_json(const Tolerances& t);

/// Serialized report; identical inputs give identical bytes.
std::string report_json(const SuiteReport& r);

/// One row per trial. Columns, in order:
///   suite,trial,status,checks,failed_checks,first_failed_check,first_failed_gap
/// The last two are empty when nothing failed.
std::string report_csv(const SuiteReport& r);

}  // namespace cvx

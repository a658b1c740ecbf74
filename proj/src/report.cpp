#include "cvx/report.hpp"

#include <iomanip>
#include <sstream>

namespace cvx {

using nlohmann::json;

const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::pass: return "pass";
    case TrialStatus::fail: return "fail";
    case TrialStatus::skip: return "skip";
  }
  return "unknown";
}

Summary SuiteReport::summary() const {
  Summary s;
  for (const auto& t : trials) {
    switch (t.status) {
      case TrialStatus::pass: ++s.pass; break;
      case TrialStatus::fail: ++s.fail; break;
      case TrialStatus::skip: ++s.skip; break;
    }
  }
  return s;
}

void SuiteReport::append(const SuiteReport& other) {
  trials.insert(trials.end(), other.trials.begin(), other.trials.end());
}

json to_json(const CheckRecord& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"gap", c.gap}, {"witness", c.witness}};
}

json to_json(const TrialRecord& t) {
  json checks = json::array();
  for (const auto& c : t.checks) checks.push_back(to_json(c));
  json out = {{"id", t.id}, {"status", to_string(t.status)}, {"instance", t.instance}, {"checks", checks}};
  if (!t.note.empty()) out["note"] = t.note;
  return out;
}

json to_json(const Tolerances& t) {
  return {{"rank", t.rank},           {"anchor", t.anchor},         {"active", t.active},
          {"support", t.support},     {"convexity", t.convexity},   {"marginal_gap", t.marginal_gap},
          {"strict_gap", t.strict_gap}, {"domain", t.domain},       {"feasibility", t.feasibility},
          {"membership", t.membership}, {"box_radius", t.box_radius}};
}

json to_json(const SuiteReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials) trials.push_back(to_json(t));
  const Summary s = r.summary();
  return {{"suite", r.suite},
          {"seed", r.seed},
          {"verification", "seeded sampling: passing checks are evidence on the sampled points, not proofs"},
          {"tolerances", to_json(r.tolerances)},
          {"trials", trials},
          {"summary", {{"pass", s.pass}, {"fail", s.fail}, {"skip", s.skip}}}};
}

std::string report_json(const SuiteReport& r) { return to_json(r).dump(2) + "\n"; }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string report_csv(const SuiteReport& r) {
  std::ostringstream os;
  os << "suite,trial,status,checks,failed_checks,first_failed_check,first_failed_gap\n";
  for (const auto& t : r.trials) {
    const auto slash = t.id.find('/');
    const std::string suite = slash == std::string::npos ? r.suite : t.id.substr(0, slash);
    std::size_t failed = 0;
    const CheckRecord* first = nullptr;
    for (const auto& c : t.checks) {
      if (c.pass) continue;
      ++failed;
      if (!first) first = &c;
    }
    os << csv_field(suite) << ',' << csv_field(t.id) << ',' << to_string(t.status) << ',' << t.checks.size() << ','
       << failed << ',';
    if (first) os << csv_field(first->name) << ',' << std::setprecision(17) << first->gap;
    else os << ',';
    os << '\n';
  }
  return os.str();
}

}  // namespace cvx

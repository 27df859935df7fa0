#include "fsk/report.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace fsk {
namespace {

// NaN and infinities have no JSON literal.
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

CheckRecord make_check(std::string name, std::string anchor, double lhs, double rhs, double slack,
                       Relation relation) {
  CheckRecord c{std::move(name), std::move(anchor), lhs, rhs, slack, relation, false};
  c.pass = relation == Relation::at_most ? lhs <= rhs + slack : lhs >= rhs - slack;
  return c;
}

void VerificationReport::set_environment(std::string key, Value value) {
  auto it = std::find_if(environment_.begin(), environment_.end(), [&](const auto& e) { return e.first == key; });
  if (it != environment_.end()) it->second = std::move(value);
  else environment_.emplace_back(std::move(key), std::move(value));
}

void VerificationReport::add_timing(std::string name, double seconds) { timings_.emplace_back(std::move(name), seconds); }

bool VerificationReport::pass() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const CheckRecord& c) { return c.pass; });
}

std::string VerificationReport::to_json(bool include_timings) const {
  nlohmann::ordered_json doc;
  doc["title"] = title_;
  doc["pass"] = pass();
  auto& env = doc["environment"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : environment_)
    std::visit([&env, &key](const auto& v) { env[key] = v; }, value);
  auto& checks = doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks_) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["anchor"] = c.anchor;
    j["relation"] = c.relation == Relation::at_most ? "lhs <= rhs + slack" : "lhs >= rhs - slack";
    j["lhs"] = number(c.lhs);
    j["rhs"] = number(c.rhs);
    j["slack"] = number(c.slack);
    j["pass"] = c.pass;
    checks.push_back(std::move(j));
  }
  if (include_timings) {
    auto& t = doc["timings"] = nlohmann::ordered_json::object();
    for (const auto& [name, seconds] : timings_) t[name] = seconds;
  }
  return doc.dump(2) + "\n";
}

}  // namespace fsk

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fsk {

enum class Relation { at_most, at_least };

/// One verified inequality: pass when lhs <= rhs + slack (at_most) or
/// lhs >= rhs - slack (at_least).
struct CheckRecord {
  std::string name;
  /// Where the checked statement comes from, in words.
  std::string anchor;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  Relation relation = Relation::at_most;
  bool pass = false;
};

CheckRecord make_check(std::string name, std::string anchor, double lhs, double rhs, double slack,
                       Relation relation = Relation::at_most);

class VerificationReport {
 public:
  using Value = std::variant<std::int64_t, double, bool, std::string>;

  explicit VerificationReport(std::string title = "verification") : title_(std::move(title)) {}

  void add(CheckRecord check) { checks_.push_back(std::move(check)); }
  void set_environment(std::string key, Value value);
  void add_timing(std::string name, double seconds);

  const std::vector<CheckRecord>& checks() const { return checks_; }
  bool pass() const;

  /// Stable key order; the timings block is the only run-dependent part.
  std::string to_json(bool include_timings = true) const;

 private:
  std::string title_;
  std::vector<CheckRecord> checks_;
  std::vector<std::pair<std::string, Value>> environment_;
  std::vector<std::pair<std::string, double>> timings_;
};

}  // namespace fsk

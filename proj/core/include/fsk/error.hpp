#pragma once

#include <stdexcept>
#include <string>

namespace fsk {

enum class Errc {
  non_increasing_knots,
  too_few_intervals,
  out_of_domain,
  resolution_mismatch,
  max_iter_exceeded,
  point_budget_exceeded,
  inadmissible_scale,
  corner_value_violation,
  identity_operator,
  corner_fix_violation,
  identity_map,
  degree_too_small,
  precondition_violated,
  max_terms_exceeded,
  shape_mismatch,
  unbalanced_scaling,
  hypothesis_unmet,
  bad_exponent,
  resolution_too_coarse,
  rank_deficient,
  degree_budget_exceeded,
  parse_error,
  validation_error,
  io_error,
};

const char* to_string(Errc code) noexcept;

/// Library-wide exception. Every failure mode is tagged with an Errc so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fsk

#include "fsk/error.hpp"

namespace fsk {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::non_increasing_knots: return "NonIncreasingKnots";
    case Errc::too_few_intervals: return "TooFewIntervals";
    case Errc::out_of_domain: return "OutOfDomain";
    case Errc::resolution_mismatch: return "ResolutionMismatch";
    case Errc::max_iter_exceeded: return "MaxIterExceeded";
    case Errc::point_budget_exceeded: return "PointBudgetExceeded";
    case Errc::inadmissible_scale: return "InadmissibleScale";
    case Errc::corner_value_violation: return "CornerValueViolation";
    case Errc::identity_operator: return "IdentityOperator";
    case Errc::corner_fix_violation: return "CornerFixViolation";
    case Errc::identity_map: return "IdentityMap";
    case Errc::degree_too_small: return "DegreeTooSmall";
    case Errc::precondition_violated: return "PreconditionViolated";
    case Errc::max_terms_exceeded: return "MaxTermsExceeded";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::unbalanced_scaling: return "UnbalancedScaling";
    case Errc::hypothesis_unmet: return "HypothesisUnmet";
    case Errc::bad_exponent: return "BadExponent";
    case Errc::resolution_too_coarse: return "ResolutionTooCoarse";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::degree_budget_exceeded: return "DegreeBudgetExceeded";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace fsk

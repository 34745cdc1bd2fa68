#include "chi2w/error.hpp"

namespace chi2w {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::AllZeroCovariance: return "AllZeroCovariance";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::TooFewTerms: return "TooFewTerms";
    case ErrorCode::NonConvergedQuadrature: return "NonConvergedQuadrature";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace chi2w

#ifndef SEMILAB_TYPES_HPP
#define SEMILAB_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace semilab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorCode {
  SingularGram,
  DimensionMismatch,
  SingularSystem,
  NotSectorial,
  ExpOverflow,
  ContourOutsideSector,
  QuadratureUnstable,
  NotSymmetric,
  RealLambda,
  ModesExceedGrid,
  QuadratureOrderTooLow,
  EmptyDomain,
  InitialDataNotConverging,
  CellUnderResolved,
  NotPositiveDefinite,
  SolverStagnation,
  SupportViolation,
  TruncationTooSmall,
  ProbeSupportTooLarge,
  ConfigInvalid,
  ExperimentFailed,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NotSectorial: return "NotSectorial";
    case ErrorCode::ExpOverflow: return "ExpOverflow";
    case ErrorCode::ContourOutsideSector: return "ContourOutsideSector";
    case ErrorCode::QuadratureUnstable: return "QuadratureUnstable";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::RealLambda: return "RealLambda";
    case ErrorCode::ModesExceedGrid: return "ModesExceedGrid";
    case ErrorCode::QuadratureOrderTooLow: return "QuadratureOrderTooLow";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::InitialDataNotConverging: return "InitialDataNotConverging";
    case ErrorCode::CellUnderResolved: return "CellUnderResolved";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SolverStagnation: return "SolverStagnation";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::ProbeSupportTooLarge: return "ProbeSupportTooLarge";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ExperimentFailed: return "ExperimentFailed";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

/// Error type for every failure the library raises; carries a stable code so
/// callers can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace semilab

#endif  // SEMILAB_TYPES_HPP

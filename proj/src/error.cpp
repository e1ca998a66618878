#include "beamspec/error.hpp"

namespace beamspec {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TooCoarse: return "TooCoarse";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::OnEigenvalue: return "OnEigenvalue";
    case ErrorKind::NotInWeightClass: return "NotInWeightClass";
    case ErrorKind::NoNegativeSpectrum: return "NoNegativeSpectrum";
    case ErrorKind::NodalMismatch: return "NodalMismatch";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::TrivialFunction: return "TrivialFunction";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::BoundaryViolation: return "BoundaryViolation";
    case ErrorKind::AsymptoticMismatch: return "AsymptoticMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::StartFailure: return "StartFailure";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::GammaNotAdmissible: return "GammaNotAdmissible";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace beamspec

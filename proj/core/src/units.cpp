#include "cavpulse/units.hpp"

#include <cmath>

#include "cavpulse/error.hpp"

namespace cavpulse {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InconsistentMirrors: return "InconsistentMirrors";
    case ErrorCode::ThresholdExceeded: return "ThresholdExceeded";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::SingularKernel: return "SingularKernel";
    case ErrorCode::NoPulses: return "NoPulses";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

double temperature_to_theta(double kelvin) {
  if (!(kelvin >= 0.0) || !std::isfinite(kelvin)) {
    throw Error(ErrorCode::InvalidParameter,
                "invalid parameter 'temperature': must be finite and non-negative");
  }
  return kTwoPi * Units::kB * kelvin / Units::hbar;
}

double theta_to_temperature(double theta_rad_per_s) {
  return theta_rad_per_s * Units::hbar / (kTwoPi * Units::kB);
}

double NaturalScale::theta_ratio(double kelvin) const {
  return temperature_to_theta(kelvin) / omega_si;
}

double NaturalScale::kelvin(double theta_ratio) const {
  return theta_to_temperature(theta_ratio * omega_si);
}

}  // namespace cavpulse

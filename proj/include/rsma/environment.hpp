#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace rsma {

// Propagation constants of the air-to-ground models. Defaults are the
// dense-urban set: LoS-probability sigmoid (9.61, 0.16) and Rician K-factor
// endpoints (5, 15) dB.
struct EnvironmentParams {
  double plos_a = 9.61;  // LoS-probability sigmoid offset, degree-calibrated
  double plos_b = 0.16;  // LoS-probability slope per degree
  double k0_db = 5.0;    // Rician K at grazing elevation, dB
  double k90_db = 15.0;  // Rician K at zenith, dB
  double kappa = 0.2;    // excess NLoS attenuation factor
  double beta0 = 1.0;    // channel power at 1 m reference distance

  // Path-loss exponent: fixed when set, otherwise derived from the elevation
  // angle (or from altitude, in the probabilistic-LoS model).
  std::optional<double> alpha_fixed = 2.0;

  // Curve-fit constants of the altitude-dependent exponent model.
  double altitude_p1 = 4.0;
  double altitude_p2 = 1.0;

  void validate() const {
    if (!(plos_a > 0.0)) throw std::invalid_argument("EnvironmentParams: plos_a must be > 0");
    if (!(plos_b > 0.0)) throw std::invalid_argument("EnvironmentParams: plos_b must be > 0");
    if (!(kappa > 0.0 && kappa <= 1.0))
      throw std::invalid_argument("EnvironmentParams: kappa must be in (0, 1]");
    if (!(beta0 > 0.0)) throw std::invalid_argument("EnvironmentParams: beta0 must be > 0");
    if (!(k90_db >= k0_db))
      throw std::invalid_argument("EnvironmentParams: k90_db must be >= k0_db");
    if (alpha_fixed && !(*alpha_fixed >= 2.0 && *alpha_fixed <= 6.0))
      throw std::invalid_argument("EnvironmentParams: alpha_fixed must be in [2, 6]");
    if (!std::isfinite(altitude_p1) || !std::isfinite(altitude_p2))
      throw std::invalid_argument("EnvironmentParams: altitude exponent constants must be finite");
  }
};

}  // namespace rsma

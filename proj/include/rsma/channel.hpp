#pragma once

// Air-to-ground channel models: free-space and probabilistic-LoS large-scale
// gain, elevation-dependent Rician K-factor, and per-antenna Rician
// small-scale fading. The Monte-Carlo harness splits a channel draw into the
// random NLoS components (draw_small_scale) and their deterministic
// recombination at a given transmitter location (assemble_channel), so that
// placement candidates can be compared on the same fading realization.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "rsma/environment.hpp"
#include "rsma/geometry.hpp"
#include "rsma/rng.hpp"

namespace rsma {

inline constexpr int kNumUsers = 2;

// Amplitude gain of the free-space path-loss model, sqrt(beta0 * d^-2).
inline double free_space_gain(double distance_m, double beta0) {
  if (!(distance_m > 0.0)) throw std::domain_error("free_space_gain: distance must be > 0");
  if (!(beta0 > 0.0)) throw std::domain_error("free_space_gain: beta0 must be > 0");
  return std::sqrt(beta0) / distance_m;
}

// Altitude-dependent path-loss exponent, max(p1 - p2*log10(q), 2).
inline double altitude_alpha(double altitude_m, double p1, double p2) {
  if (!(altitude_m > 0.0)) throw std::domain_error("altitude_alpha: altitude must be > 0");
  return std::max(p1 - p2 * std::log10(altitude_m), 2.0);
}

// LoS probability as a sigmoid of the elevation angle. The published
// constants are calibrated in degrees, so the angle converts internally.
inline double plos(double theta_rad, double a, double b) {
  if (!(theta_rad >= 0.0 && theta_rad <= std::numbers::pi / 2.0 + 1e-12))
    throw std::domain_error("plos: elevation must be in [0, pi/2]");
  const double theta_deg = theta_rad * 180.0 / std::numbers::pi;
  return 1.0 / (1.0 + a * std::exp(-b * (theta_deg - a)));
}

// Amplitude gain of the probabilistic LoS/NLoS mixture,
// sqrt(beta_LoS * P_LoS + beta_NLoS * (1 - P_LoS)). The exponent comes from
// alpha_fixed when set, otherwise from the altitude model at q = d*sin(theta).
inline double probabilistic_channel_gain(double distance_m, double theta_rad,
                                         const EnvironmentParams& env) {
  if (!(distance_m > 0.0))
    throw std::domain_error("probabilistic_channel_gain: distance must be > 0");
  const double alpha =
      env.alpha_fixed ? *env.alpha_fixed
                      : altitude_alpha(distance_m * std::sin(theta_rad), env.altitude_p1,
                                       env.altitude_p2);
  const double p_los = plos(theta_rad, env.plos_a, env.plos_b);
  const double beta_los = env.beta0 * std::pow(distance_m, -alpha);
  const double beta_nlos = env.kappa * beta_los;
  return std::sqrt(beta_los * p_los + beta_nlos * (1.0 - p_los));
}

// Elevation-dependent Rician K-factor (linear scale), K(theta) = a1*e^(b1*theta)
// with a1 = K(0) and b1 = (2/pi) * ln(K(pi/2)/K(0)), endpoints given in dB.
inline double rician_k(double theta_rad, double k0_db, double k90_db) {
  if (!(theta_rad >= 0.0 && theta_rad <= std::numbers::pi / 2.0 + 1e-12))
    throw std::domain_error("rician_k: elevation must be in [0, pi/2]");
  const double a1 = std::pow(10.0, k0_db / 10.0);
  const double b1 = (2.0 / std::numbers::pi) * std::log(std::pow(10.0, (k90_db - k0_db) / 10.0));
  return a1 * std::exp(b1 * theta_rad);
}

// One Rician small-scale coefficient: sqrt(K/(K+1)) * LoS + sqrt(1/(K+1)) * NLoS
// with a unit-modulus LoS component and CN(0,1) scatter, so E[|g|^2] = 1.
inline std::complex<double> sample_small_scale(double k_linear, RandomStream& rng) {
  if (!(k_linear >= 0.0)) throw std::domain_error("sample_small_scale: K must be >= 0");
  const std::complex<double> los{1.0, 0.0};
  return std::sqrt(k_linear / (k_linear + 1.0)) * los +
         std::sqrt(1.0 / (k_linear + 1.0)) * rng.next_cgauss();
}

// Per-user, per-antenna channel vectors plus the geometry-derived metadata
// every optimizer step consumes.
struct ChannelRealization {
  std::array<Eigen::VectorXcd, kNumUsers> gains;
  std::array<double, kNumUsers> distance_m{};
  std::array<double, kNumUsers> elevation_rad{};
  std::array<double, kNumUsers> rician_k_linear{};
  std::array<double, kNumUsers> alpha{};
};

// The random content of one realization: i.i.d. CN(0,1) NLoS components per
// user and antenna, independent of where the transmitter ends up.
struct SmallScaleDraw {
  std::array<Eigen::VectorXcd, kNumUsers> nlos;
};

namespace detail {
inline constexpr std::uint64_t kNlosStreamTag = 0x6e6c6f73;  // "nlos"
}

// Each (user, antenna) coefficient comes from its own keyed substream, so the
// draw is independent of evaluation order and of the worker that computes it.
inline SmallScaleDraw draw_small_scale(int n_antennas, const RandomStream& realization_stream) {
  if (n_antennas < 1) throw std::invalid_argument("draw_small_scale: need at least one antenna");
  SmallScaleDraw draw;
  for (int u = 0; u < kNumUsers; ++u) {
    draw.nlos[u].resize(n_antennas);
    const RandomStream user_stream =
        realization_stream.substream(detail::kNlosStreamTag + static_cast<std::uint64_t>(u));
    for (int i = 0; i < n_antennas; ++i) {
      RandomStream coeff_stream = user_stream.substream(static_cast<std::uint64_t>(i));
      draw.nlos[u](i) = coeff_stream.next_cgauss();
    }
  }
  return draw;
}

// Combine a fading draw with the large-scale state at the given geometry:
// h_u^i = sqrt(beta0) * d_u^(-alpha/2) * (sqrt(K/(K+1)) + sqrt(1/(K+1)) * nlos_u^i).
// With alpha_fixed unset the exponent follows the elevation angle,
// alpha = a * P_LoS(theta) + b.
inline ChannelRealization assemble_channel(const Geometry& geometry,
                                           const EnvironmentParams& env,
                                           const SmallScaleDraw& draw) {
  geometry.validate();
  env.validate();
  ChannelRealization out;
  for (int u = 0; u < kNumUsers; ++u) {
    const Vec3& user = geometry.user_positions[u];
    const double d = distance(geometry.abs_position, user);
    if (!(d > 0.0)) throw std::domain_error("assemble_channel: transmitter coincides with a user");
    const double theta = elevation_angle(geometry.abs_position, user);
    const double k = rician_k(theta, env.k0_db, env.k90_db);
    const double alpha = env.alpha_fixed
                             ? *env.alpha_fixed
                             : env.plos_a * plos(theta, env.plos_a, env.plos_b) + env.plos_b;
    const double large_scale = std::sqrt(env.beta0) * std::pow(d, -alpha / 2.0);
    const double los_scale = std::sqrt(k / (k + 1.0));
    const double nlos_scale = std::sqrt(1.0 / (k + 1.0));

    const auto n = draw.nlos[u].size();
    out.gains[u].resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
      out.gains[u](i) = large_scale * (los_scale + nlos_scale * draw.nlos[u](i));
    out.distance_m[u] = d;
    out.elevation_rad[u] = theta;
    out.rician_k_linear[u] = k;
    out.alpha[u] = alpha;
  }
  return out;
}

// Draws the NLoS components sequentially from the given stream (advancing
// it), then recombines. Two calls on the same stream give two independent
// realizations; recreating the stream from the same seed reproduces them.
inline ChannelRealization sample_channel(const Geometry& geometry, const EnvironmentParams& env,
                                         int n_antennas, RandomStream& rng) {
  if (n_antennas < 1) throw std::invalid_argument("sample_channel: need at least one antenna");
  SmallScaleDraw draw;
  for (int u = 0; u < kNumUsers; ++u) {
    draw.nlos[u].resize(n_antennas);
    for (int i = 0; i < n_antennas; ++i) draw.nlos[u](i) = rng.next_cgauss();
  }
  return assemble_channel(geometry, env, draw);
}

}  // namespace rsma

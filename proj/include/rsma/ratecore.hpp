#pragma once

// Deterministic SINR / rate / MSE / AWMSE algebra of the two-user
// rate-splitting downlink. Every optimizer step and most tests are phrased in
// terms of these functions, so they stay pure and dependency-free.
//
// Stream layout: the precoder has three columns [common, user1, user2]. Both
// users decode the common stream first (treating the privates as noise),
// cancel it, then decode their own private stream with the other user's
// private as residual interference.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "rsma/channel.hpp"

namespace rsma {

using Complex = std::complex<double>;

// N x 3 complex precoding matrix, columns [p_common, p_user1, p_user2],
// entries in sqrt(power) units.
using Precoder = Eigen::Matrix<Complex, Eigen::Dynamic, 3>;

using UserChannels = std::array<Eigen::VectorXcd, kNumUsers>;

inline constexpr int kCommonColumn = 0;
constexpr int private_column(int user) { return user + 1; }

// Portion of the common rate allocated to each user (r in the problem
// statement), bits/s/Hz each.
struct RateSplit {
  std::array<double, kNumUsers> common_rate{0.0, 0.0};
};

struct SinrReport {
  std::array<double, kNumUsers> common{};  // decoding the common stream
  std::array<double, kNumUsers> priv{};    // decoding the own private stream
};

struct Equalizers {
  std::array<Complex, kNumUsers> common{};
  std::array<Complex, kNumUsers> priv{};
};

struct StreamMse {
  std::array<double, kNumUsers> common{};
  std::array<double, kNumUsers> priv{};
};

struct StreamWeights {
  std::array<double, kNumUsers> common{};
  std::array<double, kNumUsers> priv{};
};

namespace detail {

inline void check_dimensions(const UserChannels& h, const Precoder& p, double sigma2) {
  if (h[0].size() == 0 || h[0].size() != h[1].size())
    throw std::invalid_argument("channel vectors must be nonempty and equally sized");
  if (p.rows() != h[0].size())
    throw std::invalid_argument("precoder row count must match the antenna count");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("noise power must be positive");
}

// |h_u^H p_c|^2 for all users and columns, plus the per-user received powers
// T_u^12 (all streams + noise) and T_u^u (privates + noise).
struct ReceivedPowers {
  std::array<std::array<double, 3>, kNumUsers> beam_power{};  // |h_u^H p_c|^2
  std::array<double, kNumUsers> t_common{};
  std::array<double, kNumUsers> t_priv{};
  std::array<Complex, kNumUsers> common_dot{};  // h_u^H p_common
  std::array<Complex, kNumUsers> priv_dot{};    // h_u^H p_user
};

inline ReceivedPowers received_powers(const UserChannels& h, const Precoder& p, double sigma2) {
  ReceivedPowers r;
  for (int u = 0; u < kNumUsers; ++u) {
    for (int c = 0; c < 3; ++c) {
      const Complex dot = h[u].dot(p.col(c));  // conjugates h
      r.beam_power[u][c] = std::norm(dot);
      if (c == kCommonColumn) r.common_dot[u] = dot;
      if (c == private_column(u)) r.priv_dot[u] = dot;
    }
    r.t_common[u] = r.beam_power[u][0] + r.beam_power[u][1] + r.beam_power[u][2] + sigma2;
    r.t_priv[u] = r.t_common[u] - r.beam_power[u][kCommonColumn];
  }
  return r;
}

}  // namespace detail

inline SinrReport sinr(const UserChannels& h, const Precoder& p, double sigma2) {
  detail::check_dimensions(h, p, sigma2);
  const auto rp = detail::received_powers(h, p, sigma2);
  SinrReport out;
  for (int u = 0; u < kNumUsers; ++u) {
    const int other = 1 - u;
    out.common[u] = rp.beam_power[u][kCommonColumn] /
                    (rp.beam_power[u][private_column(u)] + rp.beam_power[u][private_column(other)] +
                     sigma2);
    out.priv[u] = rp.beam_power[u][private_column(u)] /
                  (rp.beam_power[u][private_column(other)] + sigma2);
  }
  return out;
}

inline double rate(double gamma, double bandwidth) {
  return bandwidth * std::log2(1.0 + gamma);
}

// Largest decodable common rate, min_u R_u^12.
inline double common_rate_cap(const UserChannels& h, const Precoder& p, double sigma2,
                              double bandwidth) {
  const SinrReport s = sinr(h, p, sigma2);
  return std::min(rate(s.common[0], bandwidth), rate(s.common[1], bandwidth));
}

inline Equalizers mmse_equalizers(const UserChannels& h, const Precoder& p, double sigma2) {
  detail::check_dimensions(h, p, sigma2);
  const auto rp = detail::received_powers(h, p, sigma2);
  Equalizers f;
  for (int u = 0; u < kNumUsers; ++u) {
    f.common[u] = std::conj(rp.common_dot[u]) / rp.t_common[u];
    f.priv[u] = std::conj(rp.priv_dot[u]) / rp.t_priv[u];
  }
  return f;
}

// MSE of a single stream for an arbitrary equalizer: |f|^2 T - 2 Re(f h^H p) + 1.
inline double stream_mse(Complex f, double received_power, Complex channel_dot_beam) {
  return std::norm(f) * received_power - 2.0 * (f * channel_dot_beam).real() + 1.0;
}

// Minimum MSEs, eps = I/T; satisfies gamma = 1/eps - 1 against sinr().
inline StreamMse mmse_values(const UserChannels& h, const Precoder& p, double sigma2) {
  detail::check_dimensions(h, p, sigma2);
  const auto rp = detail::received_powers(h, p, sigma2);
  StreamMse e;
  for (int u = 0; u < kNumUsers; ++u) {
    e.common[u] = (rp.t_common[u] - rp.beam_power[u][kCommonColumn]) / rp.t_common[u];
    e.priv[u] = (rp.t_priv[u] - rp.beam_power[u][private_column(u)]) / rp.t_priv[u];
  }
  return e;
}

// Optimal AWMSE weights mu* = 1/eps. The floor keeps weights finite for
// near-perfect streams; at desk SNRs it is never reached.
inline constexpr double kMseFloor = 1e-15;

inline StreamWeights optimal_weights(const StreamMse& mse) {
  StreamWeights w;
  for (int u = 0; u < kNumUsers; ++u) {
    w.common[u] = 1.0 / std::max(mse.common[u], kMseFloor);
    w.priv[u] = 1.0 / std::max(mse.priv[u], kMseFloor);
  }
  return w;
}

// Augmented weighted MSE, zeta = mu*eps - log2(mu). At (eps_mmse, mu*) this
// equals 1 - R for the stream's rate.
inline double awmse(double mse, double weight) { return weight * mse - std::log2(weight); }

// Everything the alternating optimization needs at the MMSE point of a given
// precoder: equalizers, weights, MSEs, received powers, interference, AWMSEs.
struct WmmseState {
  Equalizers equalizers;
  StreamWeights weights;
  StreamMse mse;
  std::array<double, kNumUsers> t_common{}, t_priv{};
  std::array<double, kNumUsers> i_common{}, i_priv{};
  std::array<double, kNumUsers> zeta_common{}, zeta_priv{};
};

inline WmmseState wmmse_state(const UserChannels& h, const Precoder& p, double sigma2) {
  WmmseState st;
  st.equalizers = mmse_equalizers(h, p, sigma2);
  st.mse = mmse_values(h, p, sigma2);
  st.weights = optimal_weights(st.mse);
  const auto rp = detail::received_powers(h, p, sigma2);
  for (int u = 0; u < kNumUsers; ++u) {
    st.t_common[u] = rp.t_common[u];
    st.t_priv[u] = rp.t_priv[u];
    st.i_common[u] = rp.t_common[u] - rp.beam_power[u][kCommonColumn];
    st.i_priv[u] = rp.t_priv[u] - rp.beam_power[u][private_column(u)];
    st.zeta_common[u] = awmse(st.mse.common[u], st.weights.common[u]);
    st.zeta_priv[u] = awmse(st.mse.priv[u], st.weights.priv[u]);
  }
  return st;
}

struct RateReport {
  SinrReport sinrs;
  std::array<double, kNumUsers> common_stream_rate{};  // R_u^12
  std::array<double, kNumUsers> private_rate{};        // R_u^u
  std::array<double, kNumUsers> common_share{};        // R_u^com = r_u
  std::array<double, kNumUsers> total{};               // R_u^tot
  double wsr = 0.0;
};

// Rates and weighted sum rate for a precoder and common-rate split. The split
// must respect r >= 0 and r1 + r2 <= min_u R_u^12.
inline RateReport rate_report(const UserChannels& h, const Precoder& p, const RateSplit& split,
                              double sigma2, double bandwidth,
                              const std::array<double, kNumUsers>& user_weights) {
  RateReport rep;
  rep.sinrs = sinr(h, p, sigma2);
  for (int u = 0; u < kNumUsers; ++u) {
    if (split.common_rate[u] < -1e-12)
      throw std::invalid_argument("rate_report: common-rate share must be nonnegative");
    rep.common_stream_rate[u] = rate(rep.sinrs.common[u], bandwidth);
    rep.private_rate[u] = rate(rep.sinrs.priv[u], bandwidth);
  }
  const double cap = std::min(rep.common_stream_rate[0], rep.common_stream_rate[1]);
  const double split_sum = split.common_rate[0] + split.common_rate[1];
  if (split_sum > cap + 1e-9 * std::max(1.0, cap))
    throw std::invalid_argument("rate_report: common-rate split " + std::to_string(split_sum) +
                                " exceeds the common-rate cap " + std::to_string(cap));
  for (int u = 0; u < kNumUsers; ++u) {
    rep.common_share[u] = std::max(split.common_rate[u], 0.0);
    rep.total[u] = rep.common_share[u] + rep.private_rate[u];
    rep.wsr += user_weights[u] * rep.total[u];
  }
  return rep;
}

}  // namespace rsma

#pragma once

// WMMSE-based alternating optimization of the weighted sum rate: alternate
// between (i) closed-form MMSE equalizers and weights at the current precoder
// and (ii) the convex subproblem in (P, x), until the WSR settles. SDMA and
// NOMA are the same loop with parts of the rate-splitting structure pinned:
//
//   SDMA: no common stream, r = 0, private beams only.
//   NOMA: the weaker user's message rides entirely on the common stream (its
//         private column is zero, the stronger user takes no common share);
//         the strong user decodes and cancels the common stream, then its
//         private one.
//
// A stream whose MMSE rate has collapsed to zero (e.g. the common stream when
// warm-starting from an SDMA point) is pinned for the remaining iterations:
// its equalizer is zero, so no block update can revive it, and keeping it
// unpinned would hand the barrier solver a zero-volume feasible set.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rsma/ratecore.hpp"
#include "rsma/rng.hpp"
#include "rsma/solver.hpp"

namespace rsma {

enum class Scheme { Rsma, Sdma, Noma };

inline const char* to_token(Scheme s) {
  switch (s) {
    case Scheme::Rsma: return "rsma";
    case Scheme::Sdma: return "sdma";
    case Scheme::Noma: return "noma";
  }
  return "?";
}

struct InitMrtSplit {};
struct InitRandom {
  int restarts = 4;
  std::uint64_t seed = 0;
};
struct InitWarmStart {
  Precoder precoder;
};
using InitStrategy = std::variant<InitMrtSplit, InitRandom, InitWarmStart>;

struct AoConfig {
  Scheme scheme = Scheme::Rsma;
  double convergence_delta = 1e-4;  // WSR threshold, bits/s/Hz
  int max_iterations = 300;
  InitStrategy init = InitMrtSplit{};
  double sigma2 = 1.0;
  double bandwidth = 1.0;
  std::array<double, kNumUsers> user_weights{0.5, 0.5};
  double power_budget = 100.0;
  std::array<double, kNumUsers> rate_floor{0.0, 0.0};

  void validate() const {
    if (!(convergence_delta > 0.0)) throw std::invalid_argument("AoConfig: delta must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("AoConfig: need at least one iteration");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("AoConfig: sigma2 must be > 0");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("AoConfig: bandwidth must be > 0");
    if (!(power_budget > 0.0)) throw std::invalid_argument("AoConfig: power budget must be > 0");
    if (!(user_weights[0] >= 0.0 && user_weights[1] >= 0.0 &&
          user_weights[0] + user_weights[1] > 0.0))
      throw std::invalid_argument("AoConfig: user weights must be >= 0 and not both zero");
    if (!(rate_floor[0] >= 0.0 && rate_floor[1] >= 0.0))
      throw std::invalid_argument("AoConfig: rate floors must be >= 0");
  }
};

enum class AoStatus { Converged, MaxIterations, Infeasible };

struct AoResult {
  Precoder precoder;
  RateSplit split;
  RateReport report;
  int iterations = 0;
  std::vector<double> wsr_trace;  // one entry per feasible iterate, bits/s/Hz
  AoStatus status = AoStatus::MaxIterations;
  std::string diagnostics;
};

// Initial precoder construction. MRT-split points each private beam at its
// user with a quarter of the budget and the common beam at the principal
// direction of the summed channel outer products with half of it.
inline Precoder init_precoder(const UserChannels& h, const InitStrategy& strategy,
                              double power_budget) {
  const auto n = h[0].size();
  if (n == 0 || h[1].size() != n) throw std::invalid_argument("init_precoder: bad channels");
  if (!(power_budget > 0.0)) throw std::invalid_argument("init_precoder: power must be > 0");

  auto unit_or_uniform = [&](const Eigen::VectorXcd& v) {
    const double nv = v.norm();
    if (nv > 0.0) return Eigen::VectorXcd(v / nv);
    return Eigen::VectorXcd(Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(double(n))));
  };

  if (std::holds_alternative<InitMrtSplit>(strategy)) {
    Precoder p(n, 3);
    Eigen::MatrixXcd sum = h[0] * h[0].adjoint() + h[1] * h[1].adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sum);
    Eigen::VectorXcd principal = eig.eigenvectors().col(n - 1);
    if (sum.norm() == 0.0) principal = unit_or_uniform(Eigen::VectorXcd::Zero(n));
    p.col(kCommonColumn) = std::sqrt(power_budget / 2.0) * principal;
    for (int u = 0; u < kNumUsers; ++u)
      p.col(private_column(u)) = std::sqrt(power_budget / 4.0) * unit_or_uniform(h[u]);
    return p;
  }
  if (const auto* rnd = std::get_if<InitRandom>(&strategy)) {
    RandomStream stream = RandomStream::seeded(rnd->seed).substream(0);
    Precoder p(n, 3);
    for (int c = 0; c < 3; ++c)
      for (Eigen::Index i = 0; i < n; ++i) p(i, c) = stream.next_cgauss();
    const double tr = p.squaredNorm();
    return tr > 0.0 ? Precoder(std::sqrt(power_budget / tr) * p) : init_precoder(h, InitMrtSplit{}, power_budget);
  }
  const auto& warm = std::get<InitWarmStart>(strategy).precoder;
  if (warm.rows() != n) throw std::invalid_argument("init_precoder: warm start has wrong size");
  const double tr = warm.squaredNorm();
  if (tr > power_budget) return Precoder(std::sqrt(power_budget / tr) * warm);
  return warm;
}

namespace detail {

struct SchemeShape {
  std::array<bool, 3> column_active{true, true, true};
  std::array<bool, kNumUsers> x_pinned{false, false};
  int slack_user = 0;  // receives any unassigned common rate
};

inline SchemeShape scheme_shape(Scheme scheme, const UserChannels& h,
                                const std::array<double, kNumUsers>& v) {
  SchemeShape s;
  switch (scheme) {
    case Scheme::Rsma:
      s.slack_user = v[0] >= v[1] ? 0 : 1;
      break;
    case Scheme::Sdma:
      s.column_active[kCommonColumn] = false;
      s.x_pinned = {true, true};
      s.slack_user = -1;
      break;
    case Scheme::Noma: {
      const int weak = h[0].norm() < h[1].norm() ? 0 : 1;
      s.column_active[private_column(weak)] = false;
      s.x_pinned[1 - weak] = true;
      s.slack_user = weak;
      break;
    }
  }
  return s;
}

// MMSE stream rates at B = 1, used for dead-stream detection.
inline constexpr double kDeadStreamRate = 1e-9;

inline AoResult run_ao(const UserChannels& h, const AoConfig& cfg, Precoder precoder) {
  const SchemeShape shape = scheme_shape(cfg.scheme, h, cfg.user_weights);
  for (int c = 0; c < 3; ++c)
    if (!shape.column_active[c]) precoder.col(c).setZero();

  const double band = cfg.bandwidth;
  const std::array<double, kNumUsers> floor_n{cfg.rate_floor[0] / band, cfg.rate_floor[1] / band};

  AoResult res;
  std::array<double, kNumUsers> r{0.0, 0.0};  // common-rate split at B = 1

  auto record_wsr = [&](const Precoder& p, const std::array<double, kNumUsers>& split) {
    const RateReport rep =
        rate_report(h, p, RateSplit{split}, cfg.sigma2, 1.0, cfg.user_weights);
    res.wsr_trace.push_back(band * rep.wsr);
    return rep;
  };

  // Initial split: hand the whole decodable common rate to the slack user.
  if (shape.column_active[kCommonColumn]) {
    const double cap = common_rate_cap(h, precoder, cfg.sigma2, 1.0);
    r[shape.slack_user] = cap;
  }
  {
    const SinrReport s0 = sinr(h, precoder, cfg.sigma2);
    bool init_feasible = true;
    for (int u = 0; u < kNumUsers; ++u)
      if (r[u] + rate(s0.priv[u], 1.0) < floor_n[u] - 1e-12) init_feasible = false;
    if (init_feasible) record_wsr(precoder, r);
  }

  std::array<bool, 3> live = shape.column_active;
  std::array<bool, kNumUsers> x_pinned = shape.x_pinned;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    // Pin collapsed streams before handing the block to the solver.
    const StreamMse mse = mmse_values(h, precoder, cfg.sigma2);
    if (live[kCommonColumn]) {
      const double cap = std::min(-std::log2(mse.common[0]), -std::log2(mse.common[1]));
      if (cap < kDeadStreamRate) {
        live[kCommonColumn] = false;
        x_pinned = {true, true};
        r = {0.0, 0.0};
      }
    }
    for (int u = 0; u < kNumUsers; ++u)
      if (live[private_column(u)] && -std::log2(mse.priv[u]) < kDeadStreamRate)
        live[private_column(u)] = false;
    if (!live[0] && !live[1] && !live[2]) {  // nothing left to optimize
      res.status = AoStatus::Converged;
      break;
    }

    const WmmseState st = wmmse_state(h, precoder, cfg.sigma2);
    SubproblemInput sub;
    sub.channels = h;
    sub.equalizers = st.equalizers;
    sub.weights = st.weights;
    sub.user_weights = cfg.user_weights;
    sub.power_budget = cfg.power_budget;
    sub.rate_floor = floor_n;
    sub.sigma2 = cfg.sigma2;
    sub.column_active = live;
    sub.x_fixed_zero = x_pinned;
    sub.initial_precoder = precoder;

    const SubproblemSolution sol = solve_subproblem(sub);
    res.iterations = iter;
    if (sol.status == SolveStatus::Infeasible) {
      res.status = AoStatus::Infeasible;
      res.diagnostics = "subproblem infeasible at iteration " + std::to_string(iter) +
                        (iter == 1 ? " (initialization)" : "") +
                        ", worst violation " + std::to_string(sol.max_violation);
      res.precoder = precoder;
      res.split = RateSplit{{band * r[0], band * r[1]}};
      res.report = rate_report(h, precoder, RateSplit{{band * r[0], band * r[1]}}, cfg.sigma2,
                               band, cfg.user_weights);
      return res;
    }

    Precoder next = sol.precoder;
    std::array<double, kNumUsers> r_next{0.0, 0.0};
    for (int u = 0; u < kNumUsers; ++u)
      r_next[u] = x_pinned[u] ? 0.0 : std::max(0.0, -sol.x[u]);
    if (live[kCommonColumn]) {
      const double cap = common_rate_cap(h, next, cfg.sigma2, 1.0);
      double sum = r_next[0] + r_next[1];
      if (sum > cap && sum > 0.0) {
        const double scale = cap / sum;
        r_next[0] *= scale;
        r_next[1] *= scale;
        sum = cap;
      }
      // Unassigned common rate goes to the slack user; it can only help.
      if (shape.slack_user >= 0 && !x_pinned[shape.slack_user])
        r_next[shape.slack_user] += std::max(0.0, cap - sum);
    }

    // The base-2 AWMSE surrogate with the 1/eps weight update satisfies the
    // zeta = 1 - R identity but is not an exact majorizer of the rate, so a
    // step can overshoot the decodable common rate slightly and, after the
    // cap clamp, land below the previous sum rate. Treat that as the fixed
    // point: keep the previous iterate and stop.
    const double candidate_wsr =
        band * rate_report(h, next, RateSplit{r_next}, cfg.sigma2, 1.0, cfg.user_weights).wsr;
    if (!res.wsr_trace.empty() && candidate_wsr < res.wsr_trace.back()) {
      res.status = AoStatus::Converged;
      break;
    }

    precoder = std::move(next);
    r = r_next;
    res.wsr_trace.push_back(candidate_wsr);
    const auto& tr = res.wsr_trace;
    if (tr.size() >= 2 && std::abs(tr.back() - tr[tr.size() - 2]) <= cfg.convergence_delta) {
      res.status = AoStatus::Converged;
      break;
    }
  }

  res.precoder = precoder;
  res.split = RateSplit{{band * r[0], band * r[1]}};
  res.report =
      rate_report(h, precoder, res.split, cfg.sigma2, band, cfg.user_weights);
  return res;
}

}  // namespace detail

inline AoResult ao_optimize(const UserChannels& h, const AoConfig& cfg) {
  cfg.validate();
  if (h[0].size() == 0 || h[0].size() != h[1].size())
    throw std::invalid_argument("ao_optimize: bad channel dimensions");

  if (const auto* rnd = std::get_if<InitRandom>(&cfg.init)) {
    if (rnd->restarts < 1) throw std::invalid_argument("ao_optimize: need at least one restart");
    AoResult best;
    bool have = false;
    for (int j = 0; j < rnd->restarts; ++j) {
      RandomStream stream = RandomStream::seeded(rnd->seed).substream(static_cast<std::uint64_t>(j));
      Precoder p(h[0].size(), 3);
      for (int c = 0; c < 3; ++c)
        for (Eigen::Index i = 0; i < h[0].size(); ++i) p(i, c) = stream.next_cgauss();
      const double tr = p.squaredNorm();
      p = tr > 0.0 ? Precoder(std::sqrt(cfg.power_budget / tr) * p)
                   : init_precoder(h, InitMrtSplit{}, cfg.power_budget);
      AoResult res = detail::run_ao(h, cfg, std::move(p));
      if (res.status == AoStatus::Infeasible) {
        if (!have) best = std::move(res);
        continue;
      }
      if (!have || best.status == AoStatus::Infeasible || res.report.wsr > best.report.wsr) {
        best = std::move(res);
        have = true;
      }
    }
    return best;
  }
  return detail::run_ao(h, cfg, init_precoder(h, cfg.init, cfg.power_budget));
}

inline AoResult sdma_optimize(const UserChannels& h, AoConfig cfg) {
  cfg.scheme = Scheme::Sdma;
  return ao_optimize(h, cfg);
}

inline AoResult noma_optimize(const UserChannels& h, AoConfig cfg) {
  cfg.scheme = Scheme::Noma;
  return ao_optimize(h, cfg);
}

}  // namespace rsma

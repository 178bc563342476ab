#pragma once

// Self-check registry behind the `validate` CLI subcommand: quick versions of
// the core invariants (rate-WMMSE identity, AO monotonicity, solver
// certificates, channel moments, placement symmetry). Each check prints one
// pass/fail line; any failure flips the process exit code.

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "rsma/optimizer.hpp"
#include "rsma/placement.hpp"
#include "rsma/special.hpp"

namespace rsma {

struct CheckResult {
  std::string name;
  bool passed = false;
  int cases = 0;
  std::string detail;
};

namespace detail {

inline UserChannels random_channels(int n, RandomStream& rng) {
  UserChannels h;
  for (int u = 0; u < kNumUsers; ++u) {
    h[u].resize(n);
    for (int i = 0; i < n; ++i) h[u](i) = rng.next_cgauss();
  }
  return h;
}

inline Precoder random_precoder(int n, double power, RandomStream& rng) {
  Precoder p(n, 3);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < n; ++i) p(i, c) = rng.next_cgauss();
  return Precoder(std::sqrt(power / p.squaredNorm()) * p);
}

}  // namespace detail

inline std::vector<CheckResult> run_validation_checks() {
  std::vector<CheckResult> results;

  // Rate-WMMSE identity: zeta = 1 - R at the MMSE point for every stream.
  {
    CheckResult r{.name = "rate-wmmse-identity"};
    RandomStream rng = RandomStream::seeded(11).substream(0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const int n = 1 + static_cast<int>(rng.next_u64() % 6);
      const UserChannels h = detail::random_channels(n, rng);
      const Precoder p = detail::random_precoder(n, 10.0, rng);
      const double sigma2 = 0.1 + rng.next_uniform();
      const WmmseState st = wmmse_state(h, p, sigma2);
      const SinrReport s = sinr(h, p, sigma2);
      for (int u = 0; u < kNumUsers; ++u) {
        worst = std::max(worst, std::abs(st.zeta_common[u] - (1.0 - rate(s.common[u], 1.0))));
        worst = std::max(worst, std::abs(st.zeta_priv[u] - (1.0 - rate(s.priv[u], 1.0))));
      }
      r.cases += 4;
    }
    r.passed = worst <= 1e-9;
    r.detail = "worst |zeta - (1-R)| = " + std::to_string(worst);
    results.push_back(r);
  }

  // Alternating optimization produces a non-decreasing WSR trace.
  {
    CheckResult r{.name = "ao-monotonicity"};
    RandomStream rng = RandomStream::seeded(12).substream(0);
    bool ok = true;
    for (int k = 0; k < 10 && ok; ++k) {
      const UserChannels h = detail::random_channels(4, rng);
      AoConfig cfg;
      cfg.power_budget = (k % 2 == 0) ? 10.0 : 100.0;
      const AoResult res = ao_optimize(h, cfg);
      for (std::size_t i = 1; i < res.wsr_trace.size(); ++i)
        if (res.wsr_trace[i] < res.wsr_trace[i - 1] - 1e-6) ok = false;
      ++r.cases;
    }
    r.passed = ok;
    r.detail = ok ? "all traces non-decreasing" : "found a decreasing trace";
    results.push_back(r);
  }

  // Subproblem solutions carry valid optimality certificates.
  {
    CheckResult r{.name = "solver-certificates"};
    RandomStream rng = RandomStream::seeded(13).substream(0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const UserChannels h = detail::random_channels(2, rng);
      const Precoder p = detail::random_precoder(2, 5.0, rng);
      const WmmseState st = wmmse_state(h, p, 1.0);
      SubproblemInput in;
      in.channels = h;
      in.equalizers = st.equalizers;
      in.weights = st.weights;
      in.power_budget = 5.0;
      in.initial_precoder = p;
      const SubproblemSolution sol = solve_subproblem(in);
      if (sol.status == SolveStatus::Optimal)
        worst = std::max(worst, kkt_residual(in, sol));
      else
        worst = 1.0;
      ++r.cases;
    }
    r.passed = worst <= 1e-6;
    r.detail = "worst KKT residual = " + std::to_string(worst);
    results.push_back(r);
  }

  // Rician small-scale fading has unit mean-square amplitude.
  {
    CheckResult r{.name = "channel-moments"};
    bool ok = true;
    for (const double k_factor : {0.0, 10.0}) {
      RandomStream rng = RandomStream::seeded(14).substream(static_cast<std::uint64_t>(k_factor));
      double acc = 0.0;
      const int n = 20000;
      for (int i = 0; i < n; ++i) acc += std::norm(sample_small_scale(k_factor, rng));
      if (std::abs(acc / n - 1.0) > 0.05) ok = false;
      r.cases += n;
    }
    r.passed = ok;
    r.detail = ok ? "E[|g|^2] within 1 +- 0.05" : "moment outside tolerance";
    results.push_back(r);
  }

  // LoS probability is strictly increasing in the elevation angle.
  {
    CheckResult r{.name = "plos-monotone"};
    bool ok = true;
    double prev = -1.0;
    const int n = 1000;
    for (int i = 0; i <= n; ++i) {
      const double theta = (std::numbers::pi / 2.0) * i / n;
      const double p = plos(theta, 9.61, 0.16);
      if (p <= prev || p <= 0.0 || p >= 1.0) ok = false;
      prev = p;
      ++r.cases;
    }
    r.passed = ok;
    r.detail = ok ? "strictly increasing, in (0,1)" : "monotonicity violated";
    results.push_back(r);
  }

  // Laguerre L_{1/2} against the confluent hypergeometric series.
  {
    CheckResult r{.name = "laguerre-series"};
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double x = -20.0 * i / 100.0;
      // Kummer-transformed series: L_{1/2}(x) = e^x * sum (3/2)_k (-x)^k / (k!)^2.
      double term = 1.0, sum = 1.0;
      for (int k = 0; k < 200; ++k) {
        term *= (k + 1.5) * (-x) / ((k + 1.0) * (k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
      }
      const double oracle = std::exp(x) * sum;
      worst = std::max(worst, std::abs(laguerre_half(x) - oracle));
      ++r.cases;
    }
    r.passed = worst <= 1e-9;
    r.detail = "worst |impl - series| = " + std::to_string(worst);
    results.push_back(r);
  }

  // Mirror-symmetric users put the statistical placement at the midpoint.
  {
    CheckResult r{.name = "placement-symmetry", .cases = 1};
    const std::array<Vec3, kNumUsers> users{{{0, 0, 0}, {100, 0, 0}}};
    const EnvironmentParams env;
    const Vec3 w = statistical_placement(users, env, 50.0);
    r.passed = std::abs(w.x - 50.0) < 1e-9 && std::abs(w.y) < 1e-9 && w.z == 50.0;
    r.detail = "placement (" + std::to_string(w.x) + ", " + std::to_string(w.y) + ", " +
               std::to_string(w.z) + ")";
    results.push_back(r);
  }

  return results;
}

inline bool print_validation_report(std::ostream& out) {
  const auto results = run_validation_checks();
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.cases
        << " cases): " << r.detail << "\n";
    all = all && r.passed;
  }
  out << (all ? "all checks passed" : "validation FAILED") << " (" << results.size()
      << " checks)\n";
  return all;
}

}  // namespace rsma

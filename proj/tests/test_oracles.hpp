#pragma once

// Test-side oracles, deliberately independent of the implementation paths
// they check: a direct evaluation of the subproblem objective/constraints
// from first principles, a penalized Nelder-Mead polish for brute-force
// optimization, the Kummer series for L_{1/2}, and a plain fixed-point loop
// for the statistical placement.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rsma/environment.hpp"
#include "rsma/geometry.hpp"
#include "rsma/rng.hpp"
#include "rsma/solver.hpp"

namespace oracle {

// Objective and worst constraint violation of the subproblem, written out
// longhand from the AWMSE definitions (no shared code with the solver's
// realified quadratic forms).
struct DirectEval {
  double objective = 0.0;
  double worst_violation = 0.0;
};

inline DirectEval eval_subproblem(const rsma::SubproblemInput& in, const rsma::Precoder& p,
                                  const std::array<double, 2>& x) {
  using rsma::Complex;
  auto beam = [&](int u, int c) { return in.channels[u].dot(p.col(c)); };
  auto zeta_common = [&](int u) {
    double t = in.sigma2;
    for (int c = 0; c < 3; ++c) t += std::norm(beam(u, c));
    const Complex f = in.equalizers.common[u];
    const double eps = std::norm(f) * t - 2.0 * (f * beam(u, 0)).real() + 1.0;
    return in.weights.common[u] * eps - std::log2(in.weights.common[u]);
  };
  auto zeta_priv = [&](int u) {
    double t = in.sigma2 + std::norm(beam(u, 1)) + std::norm(beam(u, 2));
    const Complex f = in.equalizers.priv[u];
    const double eps = std::norm(f) * t - 2.0 * (f * beam(u, u + 1)).real() + 1.0;
    return in.weights.priv[u] * eps - std::log2(in.weights.priv[u]);
  };

  DirectEval out;
  double zeta12 = -1e300;
  for (int u = 0; u < 2; ++u) {
    out.objective += in.user_weights[u] * (x[u] + zeta_priv(u));
    zeta12 = std::max(zeta12, zeta_common(u));
    out.worst_violation =
        std::max(out.worst_violation, x[u] + zeta_priv(u) - (1.0 - in.rate_floor[u]));
    out.worst_violation = std::max(out.worst_violation, x[u]);
  }
  out.worst_violation = std::max(out.worst_violation, zeta12 - (x[0] + x[1] + 1.0));
  out.worst_violation = std::max(out.worst_violation, p.squaredNorm() - in.power_budget);
  return out;
}

// Plain Nelder-Mead on an arbitrary objective; good enough to polish a
// convex penalized problem to ~1e-6.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> start, double scale, int max_iters) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> value(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += scale;
  for (std::size_t i = 0; i <= n; ++i) value[i] = f(simplex[i]);

  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<std::size_t> order(n + 1);
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return value[a] < value[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (std::abs(value[worst] - value[best]) < 1e-13 * (1.0 + std::abs(value[best]))) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / n;
    }
    auto blend = [&](double alpha) {
      std::vector<double> pt(n);
      for (std::size_t d = 0; d < n; ++d)
        pt[d] = centroid[d] + alpha * (simplex[worst][d] - centroid[d]);
      return pt;
    };

    const auto reflected = blend(-1.0);
    const double fr = f(reflected);
    if (fr < value[order[0]]) {
      const auto expanded = blend(-2.0);
      const double fe = f(expanded);
      simplex[worst] = fe < fr ? expanded : reflected;
      value[worst] = std::min(fe, fr);
      continue;
    }
    if (fr < value[second]) {
      simplex[worst] = reflected;
      value[worst] = fr;
      continue;
    }
    const auto contracted = blend(0.5);
    const double fc = f(contracted);
    if (fc < value[worst]) {
      simplex[worst] = contracted;
      value[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {  // shrink toward the best vertex
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d)
        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      value[i] = f(simplex[i]);
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (value[i] < value[best]) best = i;
  return simplex[best];
}

struct BruteForceResult {
  double objective = 0.0;
  double violation = 0.0;
};

// Coarse random sampling plus Nelder-Mead refinement of the penalized
// subproblem for N = 1 (8 real variables). The problem is convex, so the
// polish converges to the global optimum from any start.
inline BruteForceResult brute_force_subproblem(const rsma::SubproblemInput& in,
                                               rsma::RandomStream rng) {
  const double penalty = 3e4;
  auto unpack = [&](const std::vector<double>& v) {
    rsma::Precoder p(1, 3);
    for (int c = 0; c < 3; ++c) p(0, c) = rsma::Complex{v[2 * c], v[2 * c + 1]};
    return std::make_pair(p, std::array<double, 2>{v[6], v[7]});
  };
  auto penalized = [&](const std::vector<double>& v) {
    const auto [p, x] = unpack(v);
    const DirectEval e = eval_subproblem(in, p, x);
    return e.objective + penalty * e.worst_violation * e.worst_violation;
  };

  std::vector<double> best(8, 0.0);
  double best_val = penalized(best);
  for (int s = 0; s < 6000; ++s) {
    std::vector<double> cand(8);
    double norm2 = 0.0;
    for (int d = 0; d < 6; ++d) {
      cand[d] = rng.next_normal();
      norm2 += cand[d] * cand[d];
    }
    const double radius = std::sqrt(in.power_budget) * rng.next_uniform();
    for (int d = 0; d < 6; ++d) cand[d] *= radius / std::sqrt(norm2);
    cand[6] = -2.0 * rng.next_uniform();
    cand[7] = -2.0 * rng.next_uniform();
    const double val = penalized(cand);
    if (val < best_val) {
      best_val = val;
      best = cand;
    }
  }
  // The penalized problem is convex; restarts with shrinking simplex scales
  // drive Nelder-Mead to the global optimum.
  for (const double scale :
       {0.3 * std::sqrt(in.power_budget), 0.03, 0.01, 0.003, 1e-3, 3e-4, 1e-4, 3e-5}) {
    best = nelder_mead(penalized, best, scale, 6000);
  }
  const auto [p, x] = unpack(best);
  const DirectEval e = eval_subproblem(in, p, x);
  return {e.objective, e.worst_violation};
}

// L_{1/2}(x) through the Kummer transformation of the confluent
// hypergeometric series: e^x * sum_k (3/2)_k (-x)^k / (k!)^2. All terms are
// positive for x <= 0, so there is no cancellation.
inline double laguerre_half_series(double x, int max_terms = 200) {
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < max_terms; ++k) {
    term *= (k + 1.5) * (-x) / ((k + 1.0) * (k + 1.0));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(x) * sum;
}

// Fixed point of the statistical-placement update by direct iteration.
inline rsma::Vec3 statistical_placement_fixed_point(const std::array<rsma::Vec3, 2>& users,
                                                    const rsma::EnvironmentParams& env,
                                                    double altitude, double tol = 1e-9,
                                                    int max_iters = 500) {
  rsma::Vec3 w{0.5 * (users[0].x + users[1].x), 0.5 * (users[0].y + users[1].y), altitude};
  for (int i = 0; i < max_iters; ++i) {
    double g[2];
    for (int u = 0; u < 2; ++u) {
      const double d = rsma::distance(w, users[u]);
      const double theta = rsma::elevation_angle(w, users[u]);
      const double k = rsma::rician_k(theta, env.k0_db, env.k90_db);
      const double alpha = env.alpha_fixed ? *env.alpha_fixed : 2.0;
      g[u] = std::sqrt(std::numbers::pi / 2.0) * std::pow(d, -alpha / 2.0) *
             laguerre_half_series(-k);
    }
    const double l1 = g[0] / (g[0] + g[1]), l2 = g[1] / (g[0] + g[1]);
    const rsma::Vec3 next{l1 * users[0].x + l2 * users[1].x, l1 * users[0].y + l2 * users[1].y,
                          altitude};
    if (rsma::horizontal_distance(next, w) < tol) return next;
    w = next;
  }
  return w;
}

}  // namespace oracle

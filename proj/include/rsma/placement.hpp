#pragma once

// Transmitter placement strategies: the inter-user midpoint, the
// channel-statistics fixed point (weights from the average Rician gain via
// L_{1/2}), a uniformly random point on the segment, and the per-realization
// iterative grid search that re-optimizes the precoder at every candidate.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rsma/channel.hpp"
#include "rsma/optimizer.hpp"
#include "rsma/special.hpp"

namespace rsma {

enum class PlacementVariant { DistAvg, ChannelStat, RandomOnSegment, IterativeSearch };

inline const char* to_token(PlacementVariant v) {
  switch (v) {
    case PlacementVariant::DistAvg: return "dist_avg";
    case PlacementVariant::ChannelStat: return "channel_stat";
    case PlacementVariant::RandomOnSegment: return "random_on_segment";
    case PlacementVariant::IterativeSearch: return "iterative_search";
  }
  return "?";
}

// Regulatory flight band; placements must stay inside it.
inline constexpr double kMinAltitudeM = 10.0;
inline constexpr double kMaxAltitudeM = 122.0;

struct PlacementStrategy {
  PlacementVariant variant = PlacementVariant::DistAvg;
  int grid_l = 100;  // candidate count, IterativeSearch only
  double altitude_m = 50.0;

  void validate() const {
    if (grid_l < 1) throw std::invalid_argument("PlacementStrategy: grid size must be >= 1");
    if (!(altitude_m >= kMinAltitudeM && altitude_m <= kMaxAltitudeM))
      throw std::invalid_argument("PlacementStrategy: altitude outside the allowed band");
  }
};

inline Vec3 midpoint_placement(const std::array<Vec3, kNumUsers>& users, double altitude_m) {
  return {0.5 * (users[0].x + users[1].x), 0.5 * (users[0].y + users[1].y), altitude_m};
}

namespace detail {

inline Vec3 weighted_point(const std::array<Vec3, kNumUsers>& users, double lambda1,
                           double lambda2, double altitude_m) {
  const double s = lambda1 + lambda2;
  return {(lambda1 * users[0].x + lambda2 * users[1].x) / s,
          (lambda1 * users[0].y + lambda2 * users[1].y) / s, altitude_m};
}

// Average Rician channel amplitude factor, sqrt(pi/2) d^(-alpha/2) L_{1/2}(-K).
inline double average_channel_gain(const Vec3& abs_pos, const Vec3& user,
                                   const EnvironmentParams& env) {
  const double d = distance(abs_pos, user);
  const double theta = elevation_angle(abs_pos, user);
  const double k = rician_k(theta, env.k0_db, env.k90_db);
  const double alpha = env.alpha_fixed
                           ? *env.alpha_fixed
                           : env.plos_a * plos(theta, env.plos_a, env.plos_b) + env.plos_b;
  return std::sqrt(std::numbers::pi / 2.0) * std::pow(d, -alpha / 2.0) * laguerre_half(-k);
}

}  // namespace detail

// Channel-statistics placement. The weights lambda_u depend on the distances,
// which depend on the placement, so the closed-form update is iterated from
// the midpoint until it stops moving (< 1e-6 m) or 50 rounds.
inline Vec3 statistical_placement(const std::array<Vec3, kNumUsers>& users,
                                  const EnvironmentParams& env, double altitude_m) {
  if (horizontal_distance(users[0], users[1]) == 0.0)
    return {users[0].x, users[0].y, altitude_m};
  Vec3 w = midpoint_placement(users, altitude_m);
  for (int iter = 0; iter < 50; ++iter) {
    const double g1 = detail::average_channel_gain(w, users[0], env);
    const double g2 = detail::average_channel_gain(w, users[1], env);
    const Vec3 next = detail::weighted_point(users, g1 / (g1 + g2), g2 / (g1 + g2), altitude_m);
    const double moved = horizontal_distance(next, w);
    w = next;
    if (moved < 1e-6) break;
  }
  return w;
}

// L equidistant candidate points on the inter-user segment at the flight
// altitude; L = 1 degenerates to the midpoint, L >= 2 includes the endpoints.
inline std::vector<Vec3> candidate_grid(const std::array<Vec3, kNumUsers>& users, int count,
                                        double altitude_m) {
  if (count < 1) throw std::invalid_argument("candidate_grid: need at least one candidate");
  std::vector<Vec3> grid;
  grid.reserve(count);
  if (count == 1) {
    grid.push_back(midpoint_placement(users, altitude_m));
    return grid;
  }
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    grid.push_back({users[0].x + t * (users[1].x - users[0].x),
                    users[0].y + t * (users[1].y - users[0].y), altitude_m});
  }
  return grid;
}

inline Vec3 random_on_segment(const std::array<Vec3, kNumUsers>& users, double altitude_m,
                              RandomStream& rng) {
  const double t = rng.next_uniform();
  return {users[0].x + t * (users[1].x - users[0].x),
          users[0].y + t * (users[1].y - users[0].y), altitude_m};
}

struct IterativeSearchOutcome {
  Vec3 best_point;
  int best_index = -1;
  AoResult best;
};

// Grid search over candidate transmitter locations for one fading
// realization: the NLoS components are drawn once and recombined with the
// location-dependent large-scale gain and K-factor at every candidate, so the
// comparison across candidates is paired. Candidates whose optimization turns
// out infeasible are skipped; ties keep the smallest index.
inline IterativeSearchOutcome iterative_search_with_draw(
    const std::array<Vec3, kNumUsers>& users, int count, double altitude_m,
    const EnvironmentParams& env, const SmallScaleDraw& draw, const AoConfig& cfg) {
  const std::vector<Vec3> grid = candidate_grid(users, count, altitude_m);
  IterativeSearchOutcome out;
  out.best.status = AoStatus::Infeasible;
  out.best.diagnostics = "all candidates infeasible";
  for (int j = 0; j < static_cast<int>(grid.size()); ++j) {
    const Geometry geom{grid[j], users};
    const ChannelRealization channel = assemble_channel(geom, env, draw);
    AoResult res = ao_optimize(channel.gains, cfg);
    if (res.status == AoStatus::Infeasible) continue;
    if (out.best_index < 0 || res.report.wsr > out.best.report.wsr) {
      out.best_index = j;
      out.best_point = grid[j];
      out.best = std::move(res);
    }
  }
  return out;
}

inline IterativeSearchOutcome iterative_search(const std::array<Vec3, kNumUsers>& users, int count,
                                               double altitude_m, const EnvironmentParams& env,
                                               int n_antennas, const AoConfig& cfg,
                                               RandomStream& rng) {
  return iterative_search_with_draw(users, count, altitude_m, env,
                                    draw_small_scale(n_antennas, rng), cfg);
}

}  // namespace rsma

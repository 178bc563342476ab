#pragma once

// Monte-Carlo sweep engine. Each realization owns a keyed substream of the
// master seed, so results are independent of worker count and evaluation
// order; every (SNR, scheme, strategy, rate-floor) cell at the same
// realization index sees the identical fading draw, which keeps the curves
// paired. The RSMA cell reports the best of three runs: the default MRT-split
// initialization plus warm starts from the SDMA and NOMA solutions of the
// same channel, which makes the per-realization scheme nesting exact.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rsma/channel.hpp"
#include "rsma/optimizer.hpp"
#include "rsma/placement.hpp"

namespace rsma {

struct SweepSpec {
  int n_antennas = 4;
  std::array<Vec3, kNumUsers> user_positions{{{0, 0, 0}, {100, 0, 0}}};
  double abs_altitude_m = 50.0;
  std::vector<double> snr_db_list{20.0};
  double sigma2 = 1.0;
  double bandwidth_hz = 1.0;
  std::array<double, kNumUsers> user_weights{0.5, 0.5};
  std::vector<double> r_th_list{0.0};
  std::vector<Scheme> schemes{Scheme::Rsma, Scheme::Sdma, Scheme::Noma};
  std::vector<PlacementVariant> strategies{PlacementVariant::DistAvg};
  int realizations = 100;
  int grid_l = 100;
  EnvironmentParams env;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_antennas < 1) throw std::invalid_argument("SweepSpec: need at least one antenna");
    if (realizations < 1) throw std::invalid_argument("SweepSpec: need at least one realization");
    if (grid_l < 1) throw std::invalid_argument("SweepSpec: grid_l must be >= 1");
    if (snr_db_list.empty() || r_th_list.empty() || schemes.empty() || strategies.empty())
      throw std::invalid_argument("SweepSpec: lists must be non-empty");
    for (double s : snr_db_list)
      if (!std::isfinite(s)) throw std::invalid_argument("SweepSpec: SNR values must be finite");
    for (double r : r_th_list)
      if (!(r >= 0.0)) throw std::invalid_argument("SweepSpec: rate floors must be >= 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("SweepSpec: sigma2 must be > 0");
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("SweepSpec: bandwidth must be > 0");
    if (!(abs_altitude_m >= kMinAltitudeM && abs_altitude_m <= kMaxAltitudeM))
      throw std::invalid_argument("SweepSpec: altitude outside the allowed band");
    if (!(user_weights[0] >= 0.0 && user_weights[1] >= 0.0 &&
          user_weights[0] + user_weights[1] > 0.0))
      throw std::invalid_argument("SweepSpec: bad user weights");
    Geometry g{{0.5 * (user_positions[0].x + user_positions[1].x),
                0.5 * (user_positions[0].y + user_positions[1].y), abs_altitude_m},
               user_positions};
    g.validate();
    env.validate();
  }
};

struct SweepRow {
  double snr_db = 0.0;
  Scheme scheme = Scheme::Rsma;
  PlacementVariant strategy = PlacementVariant::DistAvg;
  double r_th = 0.0;
  double mean_wsr = 0.0;
  double std_err = 0.0;
  double mean_iterations = 0.0;
  int infeasible = 0;
};

struct CellSample {
  double wsr = 0.0;
  int iterations = 0;
};

// Per-cell record across realizations; nullopt marks an infeasible run.
struct SweepCellDetail {
  double snr_db = 0.0;
  Scheme scheme = Scheme::Rsma;
  PlacementVariant strategy = PlacementVariant::DistAvg;
  double r_th = 0.0;
  std::vector<std::optional<CellSample>> per_realization;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  std::vector<SweepCellDetail> details;
};

namespace detail {

inline constexpr std::uint64_t kRealizationTag = 0x7265616c;  // "real"
inline constexpr std::uint64_t kSegmentTag = 0x736567;        // "seg"

struct SchemeTriple {
  std::optional<CellSample> rsma, sdma, noma;
};

inline std::optional<CellSample> sample_of(const AoResult& r) {
  if (r.status == AoStatus::Infeasible) return std::nullopt;
  return CellSample{r.report.wsr, r.iterations};
}

// SDMA and NOMA from the deterministic default start; RSMA as the best of the
// MRT start and warm starts from both baseline solutions.
inline SchemeTriple evaluate_schemes(const UserChannels& h, AoConfig cfg) {
  SchemeTriple out;
  cfg.init = InitMrtSplit{};
  cfg.scheme = Scheme::Sdma;
  const AoResult sdma = ao_optimize(h, cfg);
  cfg.scheme = Scheme::Noma;
  const AoResult noma = ao_optimize(h, cfg);
  out.sdma = sample_of(sdma);
  out.noma = sample_of(noma);

  cfg.scheme = Scheme::Rsma;
  std::optional<CellSample> best;
  auto consider = [&](const AoResult& r) {
    const auto s = sample_of(r);
    if (s && (!best || s->wsr > best->wsr)) best = s;
  };
  consider(ao_optimize(h, cfg));
  if (out.sdma) {
    cfg.init = InitWarmStart{sdma.precoder};
    consider(ao_optimize(h, cfg));
  }
  if (out.noma) {
    cfg.init = InitWarmStart{noma.precoder};
    consider(ao_optimize(h, cfg));
  }
  out.rsma = best;
  return out;
}

inline std::optional<CellSample> pick(const SchemeTriple& t, Scheme s) {
  switch (s) {
    case Scheme::Rsma: return t.rsma;
    case Scheme::Sdma: return t.sdma;
    case Scheme::Noma: return t.noma;
  }
  return std::nullopt;
}

}  // namespace detail

// Stream that owns all randomness of one realization, keyed by (seed, index).
inline RandomStream realization_stream(std::uint64_t master_seed, int realization_index) {
  return RandomStream::seeded(master_seed)
      .substream(detail::kRealizationTag)
      .substream(static_cast<std::uint64_t>(realization_index));
}

inline SweepOutput run_sweep_detailed(const SweepSpec& spec, int jobs = 1) {
  spec.validate();
  if (jobs < 1) throw std::invalid_argument("run_sweep: jobs must be >= 1");

  struct CellKey {
    double snr_db, r_th;
    PlacementVariant strategy;
    Scheme scheme;
  };
  std::vector<CellKey> cells;
  for (double snr : spec.snr_db_list)
    for (double r_th : spec.r_th_list)
      for (PlacementVariant strat : spec.strategies)
        for (Scheme scheme : spec.schemes) cells.push_back({snr, r_th, strat, scheme});

  const Vec3 midpoint = midpoint_placement(spec.user_positions, spec.abs_altitude_m);
  const Vec3 stat_point = statistical_placement(spec.user_positions, spec.env, spec.abs_altitude_m);

  using Samples = std::vector<std::optional<CellSample>>;
  std::vector<Samples> per_realization(spec.realizations);

  auto run_one = [&](int l) {
    const RandomStream stream = realization_stream(spec.seed, l);
    const SmallScaleDraw draw = draw_small_scale(spec.n_antennas, stream);
    RandomStream segment_stream = stream.substream(detail::kSegmentTag);
    const Vec3 random_point =
        random_on_segment(spec.user_positions, spec.abs_altitude_m, segment_stream);

    Samples samples(cells.size());
    for (double snr : spec.snr_db_list) {
      for (double r_th : spec.r_th_list) {
        AoConfig cfg;
        cfg.sigma2 = spec.sigma2;
        cfg.bandwidth = spec.bandwidth_hz;
        cfg.user_weights = spec.user_weights;
        cfg.power_budget = spec.sigma2 * std::pow(10.0, snr / 10.0);
        cfg.rate_floor = {r_th, r_th};

        for (PlacementVariant strat : spec.strategies) {
          detail::SchemeTriple triple;
          if (strat == PlacementVariant::IterativeSearch) {
            const auto grid =
                candidate_grid(spec.user_positions, spec.grid_l, spec.abs_altitude_m);
            for (const Vec3& pt : grid) {
              const ChannelRealization ch =
                  assemble_channel(Geometry{pt, spec.user_positions}, spec.env, draw);
              const detail::SchemeTriple t = detail::evaluate_schemes(ch.gains, cfg);
              auto keep_best = [](std::optional<CellSample>& best,
                                  const std::optional<CellSample>& cand) {
                if (cand && (!best || cand->wsr > best->wsr)) best = cand;
              };
              keep_best(triple.rsma, t.rsma);
              keep_best(triple.sdma, t.sdma);
              keep_best(triple.noma, t.noma);
            }
          } else {
            const Vec3 pt = strat == PlacementVariant::DistAvg       ? midpoint
                            : strat == PlacementVariant::ChannelStat ? stat_point
                                                                     : random_point;
            const ChannelRealization ch =
                assemble_channel(Geometry{pt, spec.user_positions}, spec.env, draw);
            triple = detail::evaluate_schemes(ch.gains, cfg);
          }
          for (std::size_t c = 0; c < cells.size(); ++c) {
            const CellKey& key = cells[c];
            if (key.snr_db == snr && key.r_th == r_th && key.strategy == strat)
              samples[c] = detail::pick(triple, key.scheme);
          }
        }
      }
    }
    per_realization[l] = std::move(samples);
  };

  if (jobs == 1) {
    for (int l = 0; l < spec.realizations; ++l) run_one(l);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (int l = next.fetch_add(1); l < spec.realizations; l = next.fetch_add(1)) run_one(l);
      });
    for (auto& th : workers) th.join();
  }

  // Deterministic ordered fold over realization indices.
  SweepOutput out;
  out.details.reserve(cells.size());
  out.rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepCellDetail det;
    det.snr_db = cells[c].snr_db;
    det.r_th = cells[c].r_th;
    det.strategy = cells[c].strategy;
    det.scheme = cells[c].scheme;
    det.per_realization.reserve(spec.realizations);
    for (int l = 0; l < spec.realizations; ++l) det.per_realization.push_back(per_realization[l][c]);

    SweepRow row;
    row.snr_db = det.snr_db;
    row.scheme = det.scheme;
    row.strategy = det.strategy;
    row.r_th = det.r_th;
    double sum = 0.0, iter_sum = 0.0;
    int n = 0;
    for (const auto& s : det.per_realization) {
      if (!s) {
        ++row.infeasible;
        continue;
      }
      sum += s->wsr;
      iter_sum += s->iterations;
      ++n;
    }
    if (n > 0) {
      row.mean_wsr = sum / n;
      row.mean_iterations = iter_sum / n;
      if (n > 1) {
        double ss = 0.0;
        for (const auto& s : det.per_realization)
          if (s) ss += (s->wsr - row.mean_wsr) * (s->wsr - row.mean_wsr);
        row.std_err = std::sqrt(ss / (static_cast<double>(n) * (n - 1)));
      }
    }
    out.rows.push_back(row);
    out.details.push_back(std::move(det));
  }
  return out;
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 1) {
  return run_sweep_detailed(spec, jobs).rows;
}

namespace detail {

inline std::string format_g9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

inline void sort_rows(std::vector<SweepRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
    const std::string sa = to_token(a.scheme), sb = to_token(b.scheme);
    if (sa != sb) return sa < sb;
    const std::string ta = to_token(a.strategy), tb = to_token(b.strategy);
    if (ta != tb) return ta < tb;
    return a.r_th < b.r_th;
  });
}

inline constexpr const char* kCsvHeader =
    "snr_db,scheme,strategy,r_th,mean_wsr,stderr,mean_iters,infeasible";

inline std::string to_csv(std::vector<SweepRow> rows) {
  sort_rows(rows);
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    out += detail::format_g9(r.snr_db);
    out += ',';
    out += to_token(r.scheme);
    out += ',';
    out += to_token(r.strategy);
    out += ',';
    out += detail::format_g9(r.r_th);
    out += ',';
    out += detail::format_g9(r.mean_wsr);
    out += ',';
    out += detail::format_g9(r.std_err);
    out += ',';
    out += detail::format_g9(r.mean_iterations);
    out += ',';
    out += std::to_string(r.infeasible);
    out += '\n';
  }
  return out;
}

inline void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << to_csv(rows);
  if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace rsma

// Command-line front end: Monte-Carlo sweeps to CSV, placement inspection,
// CSV-to-SVG plotting, and the invariant self-check.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rsma/config.hpp"
#include "rsma/svg_plot.hpp"
#include "rsma/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

int run_sweep_command(const std::string& config_path, const std::string& out_path,
                      std::optional<std::uint64_t> seed_override, int jobs) {
  rsma::SweepSpec spec = rsma::load_config(config_path);
  if (seed_override) spec.seed = *seed_override;
  const auto rows = rsma::run_sweep(spec, jobs);
  rsma::emit_csv(rows, out_path);
  std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  return kExitOk;
}

int run_placement_command(const std::string& config_path) {
  const rsma::SweepSpec spec = rsma::load_config(config_path);
  const rsma::RandomStream stream = rsma::realization_stream(spec.seed, 0);
  const rsma::SmallScaleDraw draw = rsma::draw_small_scale(spec.n_antennas, stream);

  rsma::AoConfig cfg;
  cfg.sigma2 = spec.sigma2;
  cfg.bandwidth = spec.bandwidth_hz;
  cfg.user_weights = spec.user_weights;
  cfg.power_budget = spec.sigma2 * std::pow(10.0, spec.snr_db_list.front() / 10.0);
  cfg.rate_floor = {spec.r_th_list.front(), spec.r_th_list.front()};

  std::cout << "one realization, seed " << spec.seed << ", SNR " << spec.snr_db_list.front()
            << " dB, rate floor " << spec.r_th_list.front() << " bps/Hz\n";
  for (const rsma::PlacementVariant strat : spec.strategies) {
    rsma::Vec3 point;
    switch (strat) {
      case rsma::PlacementVariant::DistAvg:
        point = rsma::midpoint_placement(spec.user_positions, spec.abs_altitude_m);
        break;
      case rsma::PlacementVariant::ChannelStat:
        point = rsma::statistical_placement(spec.user_positions, spec.env, spec.abs_altitude_m);
        break;
      case rsma::PlacementVariant::RandomOnSegment: {
        rsma::RandomStream seg = stream.substream(rsma::detail::kSegmentTag);
        point = rsma::random_on_segment(spec.user_positions, spec.abs_altitude_m, seg);
        break;
      }
      case rsma::PlacementVariant::IterativeSearch:
        break;  // chosen per scheme below
    }
    for (const rsma::Scheme scheme : spec.schemes) {
      rsma::AoConfig run_cfg = cfg;
      run_cfg.scheme = scheme;
      rsma::AoResult result;
      rsma::Vec3 chosen = point;
      if (strat == rsma::PlacementVariant::IterativeSearch) {
        const auto outcome = rsma::iterative_search_with_draw(
            spec.user_positions, spec.grid_l, spec.abs_altitude_m, spec.env, draw, run_cfg);
        result = outcome.best;
        chosen = outcome.best_point;
      } else {
        const rsma::ChannelRealization ch =
            rsma::assemble_channel(rsma::Geometry{point, spec.user_positions}, spec.env, draw);
        result = rsma::ao_optimize(ch.gains, run_cfg);
      }
      std::cout << rsma::to_token(strat) << "  " << rsma::to_token(scheme) << "  point=("
                << chosen.x << ", " << chosen.y << ", " << chosen.z << ")";
      if (result.status == rsma::AoStatus::Infeasible)
        std::cout << "  infeasible (" << result.diagnostics << ")\n";
      else
        std::cout << "  wsr=" << result.report.wsr << " bps/Hz  iters=" << result.iterations
                  << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSMA aerial downlink simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, in_path;
  std::optional<std::uint64_t> seed_override;
  int jobs = 1;

  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep and write a CSV");
  sweep->add_option("--config", config_path, "sweep configuration file")->required();
  sweep->add_option("--out", out_path, "output CSV path")->required();
  sweep->add_option("--seed", seed_override, "override the config seed");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  CLI::App* placement =
      app.add_subcommand("placement", "print the strategies' chosen points for one realization");
  placement->add_option("--config", config_path, "sweep configuration file")->required();

  CLI::App* plot = app.add_subcommand("plot", "render a sweep CSV as an SVG");
  plot->add_option("--in", in_path, "input CSV path")->required();
  plot->add_option("--out", out_path, "output SVG path")->required();

  CLI::App* validate = app.add_subcommand("validate", "run the invariant self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (sweep->parsed()) return run_sweep_command(config_path, out_path, seed_override, jobs);
    if (placement->parsed()) return run_placement_command(config_path);
    if (plot->parsed()) {
      rsma::emit_plot(in_path, out_path);
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }
    if (validate->parsed())
      return rsma::print_validation_report(std::cout) ? kExitOk : kExitValidationFailure;
  } catch (const rsma::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const rsma::PlotError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitOk;
}

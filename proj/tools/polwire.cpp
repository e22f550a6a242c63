// Command-line front end: dispersion tables, single-realization propagation,
// disorder sweeps, and strong-coupling signature reports.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "polwire/config.hpp"
#include "polwire/constants.hpp"
#include "polwire/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polwire;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  int threads = 1;
  std::optional<double> fit_window_fs;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "output directory (defaults to config output.directory)");
  cmd->add_option("--seed", opts.seed, "override the configured seed");
  cmd->add_option("--realizations", opts.realizations, "override sweep.n_realizations");
  cmd->add_option("--threads", opts.threads, "worker threads for ensemble execution")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fit-window-fs", opts.fit_window_fs, "override run.fit_window_fs");
  cmd->add_option("--format", opts.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
}

RunConfig load_with_overrides(const CommonOptions& opts) {
  RunConfig config = load_run_config(opts.config_path);
  if (opts.seed) {
    config.seed = *opts.seed;
    if (config.sweep) config.sweep->base_seed = *opts.seed;
  }
  if (opts.fit_window_fs) {
    config.parameters.fit_window_fs = *opts.fit_window_fs;
    if (config.sweep) config.sweep->base.fit_window_fs = *opts.fit_window_fs;
  }
  if (opts.realizations && config.sweep) config.sweep->n_realizations = *opts.realizations;
  if (opts.out_dir) config.output.directory = *opts.out_dir;
  return config;
}

fs::path ensure_out_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output.directory, ec);
  if (ec) throw IoError("cannot create output directory " + config.output.directory.string());
  return config.output.directory;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
}

std::string two_decimals(double value) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << value;
  return s.str();
}

int cmd_dispersion(const CommonOptions& opts) {
  const RunConfig config = load_with_overrides(opts);
  const auto out_dir = ensure_out_dir(config);

  DispersionTable table = ordered_dispersion(config.parameters.geometry, config.parameters.matter);
  const double cutoff = photon_energy(config.parameters.geometry, 0.0);
  double max_mode = cutoff;
  for (double q : table.q_invnm) {
    max_mode = std::max(max_mode, photon_energy(config.parameters.geometry, q));
  }
  std::ostringstream csv;
  write_dispersion_csv(table, csv);
  write_file(out_dir / "dispersion.csv", csv.str());

  std::cout << "cavity cutoff energy: " << two_decimals(cutoff) << " eV\n"
            << "max mode energy: " << two_decimals(max_mode) << " eV\n"
            << "mode energy span (max - min): " << two_decimals(max_mode - cutoff) << " eV\n"
            << "wrote " << (out_dir / "dispersion.csv").string() << "\n";
  return kExitOk;
}

json fit_report(const RunConfig& config, const TimeSeries& series, const Spectrum& spectrum,
                const StateVector& psi0, const Realization& realization,
                const SiteInterval& interval) {
  const auto& params = config.parameters;
  DispersionTable table = ordered_dispersion(params.geometry, params.matter);
  const Realization ordered = ordered_realization(params.matter);
  const StateVector ideal = prepare_wavepacket(params.wavepacket, ordered, params.geometry);
  const auto weights = momentum_distribution(ideal, ordered, table.q_invnm);

  const EarlyGrowth growth = early_growth(spectrum, psi0, interval);
  const auto bright = bright_mode_table(spectrum);
  const GapEstimate gap = polariton_gap(bright, 0.0025, params.matter.site_energy_ev);

  json report;
  report["v0_pred_nmfs"] = predict_v0(table, weights);
  try {
    const BallisticFit fit = fit_ballistic_velocity(series, 0.0, params.fit_window_fs);
    report["v0_fit_nmfs"] = fit.v0_nm_fs;
    report["r_squared"] = fit.r_squared;
  } catch (const InsufficientSamplesError&) {
    report["v0_fit_nmfs"] = nullptr;
    report["r_squared"] = nullptr;
  }
  report["window_fs"] = params.fit_window_fs;
  report["G_exact"] = growth.exact;
  report["G_weak"] = growth.weak;
  report["G_strong"] = growth.strong;
  if (gap.resolved) {
    report["gap_eV"] = gap.gap_ev;
  } else {
    report["gap_eV"] = "unresolved";
  }
  try {
    report["rabi_period_fs"] = rabi_frequency_estimate(series).period_fs;
  } catch (const NoOscillationError&) {
    report["rabi_period_fs"] = nullptr;
  } catch (const InsufficientSamplesError&) {
    report["rabi_period_fs"] = nullptr;
  }
  return report;
}

int cmd_propagate(const CommonOptions& opts) {
  const RunConfig config = load_with_overrides(opts);
  const auto out_dir = ensure_out_dir(config);
  const auto& params = config.parameters;

  const Realization realization = sample_realization(params.matter, config.seed);
  const HamiltonianMatrix hamiltonian =
      build_hamiltonian(realization, params.geometry, params.matter);
  const Spectrum spectrum = diagonalize(hamiltonian);
  const StateVector psi0 = prepare_wavepacket(params.wavepacket, realization, params.geometry);
  const SpectralPropagator propagator(spectrum, psi0);
  const SiteInterval interval = initial_interval(params.wavepacket, realization, params.geometry);
  const auto grid = uniform_grid(params.t_max_fs, params.dt_fs);
  const TimeSeries series =
      compute_observables(propagator, realization, grid,
                          params.wavepacket.center_or_default(params.geometry), interval,
                          params.n_edge);

  std::ostringstream csv;
  write_timeseries_csv(series, csv);
  write_file(out_dir / "observables.csv", csv.str());

  for (double t : config.profile_times_fs) {
    const StateVector psi = propagator.state_at(t);
    const DensityProfile profile =
        density_profile(psi, realization, params.geometry, params.bin_width_nm);
    std::ostringstream profile_csv;
    write_profile_csv(profile, profile_csv);
    std::ostringstream name;
    name << "profile_t" << t << "fs.csv";
    write_file(out_dir / name.str(), profile_csv.str());
  }

  const json report = fit_report(config, series, spectrum, psi0, realization, interval);
  write_file(out_dir / "fit_report.json", report.dump(1) + "\n");
  std::cout << report.dump(1) << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts) {
  const RunConfig config = load_with_overrides(opts);
  if (!config.sweep) {
    throw ConfigError("sweep command requires a $.sweep section in the config");
  }
  const auto out_dir = ensure_out_dir(config);
  const EnsembleResult result = run_ensemble(*config.sweep, opts.threads);
  persist(result, out_dir);

  std::ostringstream csv;
  csv.precision(12);
  csv << "axis_value,v0_fit_mean,v0_fit_sem,v0_predicted,r2_mean,max_rmsd_mean,max_rmsd_sem,"
         "chi_final_mean,chi_steady_time_fs\n";
  for (const auto& point : result.points) {
    csv << point.axis_value << ',' << point.v0_mean << ',' << point.v0_sem << ','
        << point.v0_predicted << ',' << point.r2_mean << ',' << point.max_rmsd_mean << ','
        << point.max_rmsd_sem << ',' << point.chi_final_mean << ',' << point.chi_steady_time_fs
        << '\n';
  }
  write_file(out_dir / "sweep_summary.csv", csv.str());
  std::cout << "axis " << to_string(result.plan.axis) << ": " << result.points.size()
            << " points x " << result.plan.n_realizations << " realizations -> "
            << (out_dir / "sweep_summary.csv").string() << "\n";
  return kExitOk;
}

int cmd_signatures(const CommonOptions& opts) {
  const RunConfig config = load_with_overrides(opts);
  if (!config.sweep || config.sweep->axis != SweepAxis::sigma_M) {
    throw ConfigError("signatures command requires a $.sweep section with axis \"sigma_M\"");
  }
  const auto out_dir = ensure_out_dir(config);

  const auto& plan = *config.sweep;
  json report = json::array();
  for (std::size_t point = 0; point < plan.values.size(); ++point) {
    const RunParameters params = apply_axis(plan.base, plan.axis, plan.values[point]);
    std::vector<BrightMode> pooled;
    std::vector<TimeSeries> series(plan.n_realizations);
    for (int r = 0; r < plan.n_realizations; ++r) {
      const std::uint64_t seed = mix_seed(plan.base_seed, point, r);
      const Realization realization = sample_realization(params.matter, seed);
      const HamiltonianMatrix hamiltonian =
          build_hamiltonian(realization, params.geometry, params.matter);
      const Spectrum spectrum = diagonalize(hamiltonian);
      const auto bright = bright_mode_table(spectrum);
      pooled.insert(pooled.end(), bright.begin(), bright.end());

      const StateVector psi0 =
          prepare_wavepacket(params.wavepacket, realization, params.geometry);
      const SpectralPropagator propagator(spectrum, psi0);
      const auto grid = uniform_grid(params.t_max_fs, params.dt_fs);
      const SiteInterval interval =
          initial_interval(params.wavepacket, realization, params.geometry);
      series[r] = compute_observables(propagator, realization, grid,
                                      params.wavepacket.center_or_default(params.geometry),
                                      interval, params.n_edge);
    }

    std::ostringstream csv;
    csv.precision(12);
    csv << "energy_eV,q_peak_invnm\n";
    for (const auto& mode : pooled) {
      csv << mode.energy_ev << ',' << mode.q_peak_invnm << '\n';
    }
    std::ostringstream name;
    name << "bright_modes_point_" << point << ".csv";
    write_file(out_dir / name.str(), csv.str());

    const GapEstimate gap = polariton_gap(pooled, 0.0025, params.matter.site_energy_ev);
    const SeriesStats stats = aggregate(series);
    json entry;
    entry["sigma_M_eV"] = plan.values[point];
    entry["gap_eV"] = gap.resolved ? json(gap.gap_ev) : json("unresolved");
    try {
      const RabiEstimate rabi = rabi_frequency_estimate(stats.mean);
      entry["rabi_period_fs"] = rabi.period_fs;
      entry["rabi_amplitude"] = rabi.amplitude;
    } catch (const NoOscillationError&) {
      entry["rabi_period_fs"] = nullptr;
    } catch (const InsufficientSamplesError&) {
      entry["rabi_period_fs"] = nullptr;
    }
    report.push_back(entry);
    std::cout << "sigma_M = " << plan.values[point] << " eV: gap = "
              << entry["gap_eV"].dump() << ", rabi period = "
              << entry["rabi_period_fs"].dump() << " fs\n";
  }
  write_file(out_dir / "signatures.json", report.dump(1) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polwire: exciton wave packet transport in a lossless polaritonic wire"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto* dispersion = app.add_subcommand("dispersion", "ordered polariton dispersion table");
  add_common(dispersion, opts);
  auto* propagate = app.add_subcommand("propagate", "single-realization wave packet dynamics");
  add_common(propagate, opts);
  auto* sweep = app.add_subcommand("sweep", "disorder-ensemble parameter sweep");
  add_common(sweep, opts);
  auto* signatures = app.add_subcommand("signatures", "polariton gap and Rabi oscillation report");
  add_common(signatures, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dispersion->parsed()) return cmd_dispersion(opts);
    if (propagate->parsed()) return cmd_propagate(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (signatures->parsed()) return cmd_signatures(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

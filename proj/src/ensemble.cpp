#include "polwire/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "polwire/constants.hpp"
#include "polwire/errors.hpp"

namespace polwire {

using nlohmann::json;

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::sigma_M: return "sigma_M";
    case SweepAxis::Omega_R: return "Omega_R";
    case SweepAxis::sigma_x: return "sigma_x";
    case SweepAxis::qbar0: return "qbar0";
    case SweepAxis::detuning: return "detuning";
  }
  return "sigma_M";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "sigma_M") return SweepAxis::sigma_M;
  if (name == "Omega_R") return SweepAxis::Omega_R;
  if (name == "sigma_x") return SweepAxis::sigma_x;
  if (name == "qbar0") return SweepAxis::qbar0;
  if (name == "detuning") return SweepAxis::detuning;
  throw ConfigError("unknown sweep axis '" + name +
                    "' (expected sigma_M, Omega_R, sigma_x, qbar0 or detuning)");
}

void RunParameters::validate() const {
  validate_consistency(geometry, matter);
  if (!(wavepacket.sigma_x_nm > 0.0)) throw ConfigError("wavepacket.sigma_x_nm must be positive");
  if (t_max_fs < 0.0) throw ConfigError("run.t_max_fs must be >= 0");
  if (!(dt_fs > 0.0)) throw ConfigError("run.dt_fs must be positive");
  if (!(fit_window_fs > 0.0)) throw ConfigError("run.fit_window_fs must be positive");
  if (!(bin_width_nm > 0.0)) throw ConfigError("run.bin_width_nm must be positive");
  if (n_edge < 0 || 2 * n_edge >= matter.site_count) {
    throw ConfigError("run.n_edge must satisfy 0 <= n_edge < N_M/2");
  }
}

void SweepPlan::validate() const {
  base.validate();
  if (values.empty()) throw ConfigError("sweep.values must be nonempty");
  if (n_realizations < 1) throw ConfigError("sweep.n_realizations must be >= 1");
  for (double v : values) {
    apply_axis(base, axis, v).validate();
  }
}

RunParameters apply_axis(const RunParameters& base, SweepAxis axis, double value) {
  RunParameters params = base;
  switch (axis) {
    case SweepAxis::sigma_M:
      params.matter.energy_sigma_ev = value;
      break;
    case SweepAxis::Omega_R:
      params.matter.rabi_splitting_ev = value;
      break;
    case SweepAxis::sigma_x:
      params.wavepacket.sigma_x_nm = value;
      break;
    case SweepAxis::qbar0:
      params.wavepacket.qbar0_invnm = value;
      break;
    case SweepAxis::detuning:
      params.matter.site_energy_ev = photon_energy(base.geometry, 0.0) - value;
      break;
  }
  return params;
}

namespace {

std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t point_index,
                       std::uint64_t realization_index) {
  const std::uint64_t pair = ((realization_index + 1) << 32) | (point_index + 1);
  return splitmix64_finalize(splitmix64_finalize(base_seed) ^ pair);
}

SeriesStats aggregate(const std::vector<TimeSeries>& series) {
  if (series.empty()) throw GridMismatchError("aggregate: no series");
  const std::size_t n_t = series.front().size();
  for (const auto& s : series) {
    if (s.size() != n_t || s.t_fs != series.front().t_fs) {
      throw GridMismatchError("aggregate: time grids differ");
    }
  }
  const double n = static_cast<double>(series.size());
  SeriesStats stats;
  stats.mean.t_fs = series.front().t_fs;
  stats.standard_error.t_fs = series.front().t_fs;

  auto reduce = [&](auto member) {
    std::vector<double> mean(n_t, 0.0), sem(n_t, 0.0);
    // fixed-order sequential sums for bit reproducibility
    for (const auto& s : series) {
      const auto& v = s.*member;
      for (std::size_t i = 0; i < n_t; ++i) mean[i] += v[i];
    }
    for (std::size_t i = 0; i < n_t; ++i) mean[i] /= n;
    if (series.size() > 1) {
      for (const auto& s : series) {
        const auto& v = s.*member;
        for (std::size_t i = 0; i < n_t; ++i) {
          const double d = v[i] - mean[i];
          sem[i] += d * d;
        }
      }
      for (std::size_t i = 0; i < n_t; ++i) {
        sem[i] = std::sqrt(sem[i] / (n * (n - 1.0)));
      }
    }
    stats.mean.*member = std::move(mean);
    stats.standard_error.*member = std::move(sem);
  };
  reduce(&TimeSeries::matter_probability);
  reduce(&TimeSeries::rmsd_nm);
  reduce(&TimeSeries::chi);
  reduce(&TimeSeries::boundary_probability);
  for (const auto& s : series) {
    stats.mean.max_norm_deviation = std::max(stats.mean.max_norm_deviation, s.max_norm_deviation);
  }
  return stats;
}

TimeSeries run_single_realization(const RunParameters& params, std::uint64_t seed) {
  const Realization realization = sample_realization(params.matter, seed);
  const HamiltonianMatrix hamiltonian =
      build_hamiltonian(realization, params.geometry, params.matter);
  const Spectrum spectrum = diagonalize(hamiltonian);
  const StateVector psi0 =
      prepare_wavepacket(params.wavepacket, realization, params.geometry);
  const SpectralPropagator propagator(spectrum, psi0);
  const auto grid = uniform_grid(params.t_max_fs, params.dt_fs);
  const SiteInterval interval =
      initial_interval(params.wavepacket, realization, params.geometry);
  return compute_observables(propagator, realization, grid,
                             params.wavepacket.center_or_default(params.geometry), interval,
                             params.n_edge);
}

EnsembleResult run_ensemble(const SweepPlan& plan, int n_workers) {
  plan.validate();
  if (n_workers < 1) n_workers = 1;
  use_single_threaded_blas();

  EnsembleResult result;
  result.plan = plan;
  result.code_version = kCodeVersion;
  {
    std::ostringstream plan_repr;
    plan_repr.precision(std::numeric_limits<double>::max_digits10);
    plan_repr << to_string(plan.axis) << '|' << plan.n_realizations << '|' << plan.base_seed;
    for (double v : plan.values) plan_repr << '|' << v;
    const auto& m = plan.base.matter;
    const auto& g = plan.base.geometry;
    plan_repr << '|' << g.length_x_nm << '|' << g.length_y_nm << '|' << g.length_z_nm << '|'
              << g.epsilon << '|' << g.max_mode_index << '|' << m.site_count << '|'
              << m.mean_spacing_nm << '|' << m.spacing_sigma_nm << '|' << m.site_energy_ev << '|'
              << m.energy_sigma_ev << '|' << m.rabi_splitting_ev << '|'
              << plan.base.wavepacket.sigma_x_nm << '|' << plan.base.wavepacket.qbar0_invnm;
    const std::string repr = plan_repr.str();
    std::ostringstream hash;
    hash << std::hex << fnv1a64({repr.data(), repr.size()});
    result.config_hash = hash.str();
  }

  for (std::size_t point = 0; point < plan.values.size(); ++point) {
    const RunParameters params = apply_axis(plan.base, plan.axis, plan.values[point]);
    const int n_real = plan.n_realizations;
    std::vector<TimeSeries> series(n_real);
    std::vector<BallisticFit> fits(n_real);
    std::vector<std::exception_ptr> failures(n_real);

    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int r = next.fetch_add(1); r < n_real; r = next.fetch_add(1)) {
        try {
          const std::uint64_t seed = mix_seed(plan.base_seed, point, r);
          series[r] = run_single_realization(params, seed);
          fits[r] = fit_ballistic_velocity(series[r], 0.0, params.fit_window_fs);
        } catch (...) {
          failures[r] = std::current_exception();
        }
      }
    };
    if (n_workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(n_workers);
      for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    for (int r = 0; r < n_real; ++r) {
      if (failures[r]) {
        try {
          std::rethrow_exception(failures[r]);
        } catch (const std::exception& e) {
          throw Error("sweep point " + std::to_string(point) + " realization " +
                      std::to_string(r) + " (seed " +
                      std::to_string(mix_seed(plan.base_seed, point, r)) + ") failed: " +
                      e.what());
        }
      }
    }

    PointResult point_result;
    point_result.axis_value = plan.values[point];
    point_result.realization_count = n_real;
    point_result.series = aggregate(series);

    const double n = static_cast<double>(n_real);
    double v0_sum = 0.0, r2_sum = 0.0;
    point_result.r2_min = 1.0;
    for (const auto& fit : fits) {
      v0_sum += fit.v0_nm_fs;
      r2_sum += fit.r_squared;
      point_result.r2_min = std::min(point_result.r2_min, fit.r_squared);
    }
    point_result.v0_mean = v0_sum / n;
    point_result.r2_mean = r2_sum / n;
    double v0_var = 0.0;
    for (const auto& fit : fits) {
      const double d = fit.v0_nm_fs - point_result.v0_mean;
      v0_var += d * d;
    }
    point_result.v0_sem = n_real > 1 ? std::sqrt(v0_var / (n * (n - 1.0))) : 0.0;

    std::vector<double> max_rmsd(n_real);
    for (int r = 0; r < n_real; ++r) {
      max_rmsd[r] = *std::max_element(series[r].rmsd_nm.begin(), series[r].rmsd_nm.end());
    }
    double mr_sum = 0.0;
    for (double v : max_rmsd) mr_sum += v;
    point_result.max_rmsd_mean = mr_sum / n;
    double mr_var = 0.0;
    for (double v : max_rmsd) mr_var += (v - point_result.max_rmsd_mean) * (v - point_result.max_rmsd_mean);
    point_result.max_rmsd_sem = n_real > 1 ? std::sqrt(mr_var / (n * (n - 1.0))) : 0.0;

    point_result.chi_final_mean = point_result.series.mean.chi.back();
    point_result.chi_steady_time_fs =
        steady_state_time_fs(point_result.series.mean.t_fs, point_result.series.mean.chi);
    point_result.max_norm_deviation = point_result.series.mean.max_norm_deviation;

    // dispersion-based velocity estimate on the ordered system at this point
    const DispersionTable table = ordered_dispersion(params.geometry, params.matter);
    const Realization ordered = ordered_realization(params.matter);
    const StateVector ideal = prepare_wavepacket(params.wavepacket, ordered, params.geometry);
    const auto weights = momentum_distribution(ideal, ordered, table.q_invnm);
    point_result.v0_predicted = predict_v0(table, weights);

    result.points.push_back(std::move(point_result));
  }
  return result;
}

std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  std::ostringstream hex;
  hex << std::hex << fnv1a64({bytes.data(), bytes.size()});
  return hex.str();
}

void write_series_file(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_timeseries_csv(series, out);
}

TimeSeries read_series_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string header;
  std::getline(in, header);
  if (header != "t_fs,P_M,RMSD_nm,chi,P_boundary") {
    throw CorruptPayloadError("unexpected observables header in " + path.string());
  }
  TimeSeries s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double values[5];
    char comma;
    row >> values[0];
    for (int k = 1; k < 5; ++k) row >> comma >> values[k];
    if (!row) throw CorruptPayloadError("malformed observables row in " + path.string());
    s.t_fs.push_back(values[0]);
    s.matter_probability.push_back(values[1]);
    s.rmsd_nm.push_back(values[2]);
    s.chi.push_back(values[3]);
    s.boundary_probability.push_back(values[4]);
  }
  return s;
}

}  // namespace

void persist(const EnsembleResult& result, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string());

  json manifest;
  manifest["layout_version"] = kLayoutVersion;
  manifest["code_version"] = result.code_version;
  manifest["config_hash"] = result.config_hash;
  const auto& plan = result.plan;
  manifest["plan"] = {
      {"axis", to_string(plan.axis)},
      {"values", plan.values},
      {"n_realizations", plan.n_realizations},
      {"base_seed", plan.base_seed},
      {"generator_id", kGeneratorId},
      {"base",
       {{"geometry",
         {{"Lx_nm", plan.base.geometry.length_x_nm},
          {"Ly_nm", plan.base.geometry.length_y_nm},
          {"Lz_nm", plan.base.geometry.length_z_nm},
          {"epsilon", plan.base.geometry.epsilon},
          {"m_max", plan.base.geometry.max_mode_index}}},
        {"matter",
         {{"N_M", plan.base.matter.site_count},
          {"a_nm", plan.base.matter.mean_spacing_nm},
          {"sigma_a_nm", plan.base.matter.spacing_sigma_nm},
          {"E_M_eV", plan.base.matter.site_energy_ev},
          {"sigma_M_eV", plan.base.matter.energy_sigma_ev},
          {"Omega_R_eV", plan.base.matter.rabi_splitting_ev}}},
        {"wavepacket",
         {{"sigma_x_nm", plan.base.wavepacket.sigma_x_nm},
          {"qbar0_invnm", plan.base.wavepacket.qbar0_invnm}}},
        {"run",
         {{"t_max_fs", plan.base.t_max_fs},
          {"dt_fs", plan.base.dt_fs},
          {"fit_window_fs", plan.base.fit_window_fs},
          {"bin_width_nm", plan.base.bin_width_nm},
          {"n_edge", plan.base.n_edge}}}}}};

  json points = json::array();
  for (std::size_t p = 0; p < result.points.size(); ++p) {
    const auto& point = result.points[p];
    std::ostringstream stem;
    stem << "point_" << p;
    const auto mean_path = directory / (stem.str() + "_mean.csv");
    const auto sem_path = directory / (stem.str() + "_sem.csv");
    write_series_file(point.series.mean, mean_path);
    write_series_file(point.series.standard_error, sem_path);

    json meta;
    meta["axis_value"] = point.axis_value;
    meta["realization_count"] = point.realization_count;
    meta["mean_file"] = stem.str() + "_mean.csv";
    meta["sem_file"] = stem.str() + "_sem.csv";
    meta["mean_checksum_fnv1a64"] = file_checksum(mean_path);
    meta["sem_checksum_fnv1a64"] = file_checksum(sem_path);
    meta["v0_mean"] = point.v0_mean;
    meta["v0_sem"] = point.v0_sem;
    meta["r2_mean"] = point.r2_mean;
    meta["r2_min"] = point.r2_min;
    meta["v0_predicted"] = point.v0_predicted;
    meta["max_rmsd_mean"] = point.max_rmsd_mean;
    meta["max_rmsd_sem"] = point.max_rmsd_sem;
    meta["chi_final_mean"] = point.chi_final_mean;
    meta["chi_steady_time_fs"] = point.chi_steady_time_fs;
    meta["max_norm_deviation"] = point.max_norm_deviation;
    meta["seeds"] = [&] {
      std::vector<std::uint64_t> seeds(point.realization_count);
      for (int r = 0; r < point.realization_count; ++r) {
        seeds[r] = mix_seed(result.plan.base_seed, p, r);
      }
      return seeds;
    }();
    points.push_back(meta);
  }
  manifest["points"] = points;
  std::ofstream out(directory / "manifest.json");
  if (!out) throw IoError("cannot write manifest.json");
  out << manifest.dump(1) << '\n';
}

EnsembleResult load_ensemble(const std::filesystem::path& directory) {
  std::ifstream in(directory / "manifest.json");
  if (!in) throw IoError("cannot read " + (directory / "manifest.json").string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw CorruptPayloadError(std::string("manifest.json is not valid JSON: ") + e.what());
  }
  const int version = manifest.at("layout_version").get<int>();
  if (version != kLayoutVersion) {
    throw IncompatibleVersionError("ensemble layout version " + std::to_string(version) +
                                   " != supported " + std::to_string(kLayoutVersion));
  }

  EnsembleResult result;
  result.code_version = manifest.at("code_version").get<std::string>();
  result.config_hash = manifest.at("config_hash").get<std::string>();
  const auto& plan_json = manifest.at("plan");
  result.plan.axis = sweep_axis_from_string(plan_json.at("axis").get<std::string>());
  result.plan.values = plan_json.at("values").get<std::vector<double>>();
  result.plan.n_realizations = plan_json.at("n_realizations").get<int>();
  result.plan.base_seed = plan_json.at("base_seed").get<std::uint64_t>();
  const auto& base = plan_json.at("base");
  auto& p = result.plan.base;
  p.geometry.length_x_nm = base.at("geometry").at("Lx_nm").get<double>();
  p.geometry.length_y_nm = base.at("geometry").at("Ly_nm").get<double>();
  p.geometry.length_z_nm = base.at("geometry").at("Lz_nm").get<double>();
  p.geometry.epsilon = base.at("geometry").at("epsilon").get<double>();
  p.geometry.max_mode_index = base.at("geometry").at("m_max").get<int>();
  p.matter.site_count = base.at("matter").at("N_M").get<int>();
  p.matter.mean_spacing_nm = base.at("matter").at("a_nm").get<double>();
  p.matter.spacing_sigma_nm = base.at("matter").at("sigma_a_nm").get<double>();
  p.matter.site_energy_ev = base.at("matter").at("E_M_eV").get<double>();
  p.matter.energy_sigma_ev = base.at("matter").at("sigma_M_eV").get<double>();
  p.matter.rabi_splitting_ev = base.at("matter").at("Omega_R_eV").get<double>();
  p.wavepacket.sigma_x_nm = base.at("wavepacket").at("sigma_x_nm").get<double>();
  p.wavepacket.qbar0_invnm = base.at("wavepacket").at("qbar0_invnm").get<double>();
  p.t_max_fs = base.at("run").at("t_max_fs").get<double>();
  p.dt_fs = base.at("run").at("dt_fs").get<double>();
  p.fit_window_fs = base.at("run").at("fit_window_fs").get<double>();
  p.bin_width_nm = base.at("run").at("bin_width_nm").get<double>();
  p.n_edge = base.at("run").at("n_edge").get<int>();

  for (const auto& meta : manifest.at("points")) {
    const auto mean_path = directory / meta.at("mean_file").get<std::string>();
    const auto sem_path = directory / meta.at("sem_file").get<std::string>();
    if (file_checksum(mean_path) != meta.at("mean_checksum_fnv1a64").get<std::string>()) {
      throw CorruptPayloadError("checksum mismatch for " + mean_path.string());
    }
    if (file_checksum(sem_path) != meta.at("sem_checksum_fnv1a64").get<std::string>()) {
      throw CorruptPayloadError("checksum mismatch for " + sem_path.string());
    }
    PointResult point;
    point.axis_value = meta.at("axis_value").get<double>();
    point.series.mean = read_series_file(mean_path);
    point.series.standard_error = read_series_file(sem_path);
    point.realization_count = meta.at("realization_count").get<int>();
    point.v0_mean = meta.at("v0_mean").get<double>();
    point.v0_sem = meta.at("v0_sem").get<double>();
    point.r2_mean = meta.at("r2_mean").get<double>();
    point.r2_min = meta.at("r2_min").get<double>();
    point.v0_predicted = meta.at("v0_predicted").get<double>();
    point.max_rmsd_mean = meta.at("max_rmsd_mean").get<double>();
    point.max_rmsd_sem = meta.at("max_rmsd_sem").get<double>();
    point.chi_final_mean = meta.at("chi_final_mean").get<double>();
    point.chi_steady_time_fs = meta.at("chi_steady_time_fs").get<double>();
    point.max_norm_deviation = meta.at("max_norm_deviation").get<double>();
    point.series.mean.max_norm_deviation = point.max_norm_deviation;
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace polwire

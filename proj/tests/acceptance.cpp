// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Desk-scale ensembles (N_M = 1000, 401 modes, 25 realizations)
// follow the reference protocol; ordered ballistic-fit runs use a 30 um wire
// so the 500 fs window stays clear of the periodic boundary.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>
#include <vector>

#include "polwire/config.hpp"
#include "polwire/constants.hpp"
#include "polwire/errors.hpp"

using namespace polwire;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<Criterion> results;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
  results.push_back({id, name, passed, detail});
  std::printf("[%s] criterion %2d: %s (%s)\n", passed ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

void parallel_realizations(int count, const std::function<void(int)>& body) {
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> failures(count);
  auto worker = [&]() {
    for (int r = next.fetch_add(1); r < count; r = next.fetch_add(1)) {
      try {
        body(r);
      } catch (...) {
        failures[r] = std::current_exception();
      }
    }
  };
  std::thread other(worker);
  worker();
  other.join();
  for (auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
};

MeanSem stats(const std::vector<double>& values) {
  MeanSem out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.sem = std::sqrt(var / (n * (n - 1.0)));
  }
  return out;
}

CavityGeometry paper_geometry() { return {50000.0, 200.0, 400.0, 3.0, 500}; }

CavityGeometry desk_geometry() { return {10000.0, 200.0, 400.0, 3.0, 200}; }

MatterSpec desk_matter(double sigma_m) { return {1000, 10.0, 1.0, 2.0, sigma_m, 0.1}; }

// ---------------------------------------------------------------------------

void criterion_1_cutoff() {
  const auto geom = paper_geometry();
  const double cutoff = photon_energy(geom, 0.0);
  const auto modes = photon_wavevectors(geom);
  const double max_mode = photon_energy(geom, modes.back().q_invnm);
  const bool ok = std::abs(cutoff - 2.000) <= 0.005 && std::abs(max_mode - 7.43) <= 0.01;
  report(1, "cavity cutoff and top mode energy", ok,
         "cutoff " + fmt(cutoff, 6) + " eV, max " + fmt(max_mode, 6) + " eV");
}

void criterion_2_block_oracle() {
  CavityGeometry geom{2000.0, 200.0, 400.0, 3.0, 40};
  MatterSpec matter{200, 10.0, 0.0, 2.0, 0.0, 0.1};
  const auto spectrum = diagonalize(build_hamiltonian(ordered_realization(matter), geom, matter));
  const auto table = ordered_dispersion(geom, matter);

  std::vector<double> expected;
  for (std::size_t i = 0; i < table.size(); ++i) {
    expected.push_back(table.omega_lp[i] * kHbar);
    expected.push_back(table.omega_up[i] * kHbar);
  }
  for (int k = 0; k < matter.site_count - geom.mode_count(); ++k) {
    expected.push_back(matter.site_energy_ev);
  }
  std::sort(expected.begin(), expected.end());
  double worst = 0.0;
  for (int i = 0; i < spectrum.dim(); ++i) {
    worst = std::max(worst, std::abs(spectrum.energy_ev(i) - expected[i]));
  }
  report(2, "dense spectrum matches the 2x2 block closed form", worst <= 1e-9,
         "max |dE| = " + fmt(worst, 3) + " eV over " + std::to_string(spectrum.dim()) +
             " eigenvalues");
}

void criterion_3_rabi() {
  // closed-form resonant gap
  auto geom = desk_geometry();
  MatterSpec matter = desk_matter(0.0);
  matter.site_energy_ev = photon_energy(geom, 0.0);
  const auto table = ordered_dispersion(geom, matter);
  const std::size_t center = table.size() / 2;
  const double gap = (table.omega_up[center] - table.omega_lp[center]) * kHbar;
  const bool gap_ok = std::abs(gap - 0.1) <= 1e-12;

  // weak-disorder desk ensemble: dominant P_M period
  const MatterSpec weak = desk_matter(0.005);
  const WavepacketSpec packet{120.0, 0.0, {}};
  const int n_real = 8;
  const auto grid = uniform_grid(600.0, 1.0);
  std::vector<TimeSeries> series(n_real);
  use_single_threaded_blas();
  parallel_realizations(n_real, [&](int r) {
    const auto real = sample_realization(weak, mix_seed(31003, 0, r));
    const auto spectrum = diagonalize(build_hamiltonian(real, geom, weak));
    const auto psi0 = prepare_wavepacket(packet, real, geom);
    const SpectralPropagator prop(spectrum, psi0);
    series[r] = compute_observables(prop, real, grid, 5000.0,
                                    initial_interval(packet, real, geom), 10);
  });
  const auto mean = aggregate(series).mean;
  bool period_ok = false;
  std::string detail = "resonant gap " + fmt(gap, 12) + " eV";
  try {
    const auto estimate = rabi_frequency_estimate(mean);
    period_ok = std::abs(estimate.period_fs - 41.4) <= 2.0;
    detail += ", period " + fmt(estimate.period_fs, 4) + " fs, amplitude " +
              fmt(estimate.amplitude, 3);
  } catch (const NoOscillationError&) {
    detail += ", no oscillation detected";
  }
  report(3, "Rabi splitting and oscillation period", gap_ok && period_ok, detail);
}

void criterion_4_uncertainty() {
  const auto geom = paper_geometry();
  MatterSpec matter{5000, 10.0, 0.0, 2.0, 0.0, 0.1};
  const auto real = ordered_realization(matter);
  const auto modes = photon_wavevectors(geom);
  std::vector<double> qgrid;
  for (const auto& mode : modes) qgrid.push_back(mode.q_invnm);

  bool ok = true;
  std::string detail;
  for (double sigma_x : {120.0, 240.0, 480.0}) {
    const auto psi = prepare_wavepacket({sigma_x, 0.0, {}}, real, geom);
    const auto weights = momentum_distribution(psi, real, qgrid);
    double mean = 0.0;
    for (std::size_t k = 0; k < qgrid.size(); ++k) mean += weights[k] * qgrid[k];
    double var = 0.0;
    for (std::size_t k = 0; k < qgrid.size(); ++k) {
      var += weights[k] * (qgrid[k] - mean) * (qgrid[k] - mean);
    }
    const double product = sigma_x * std::sqrt(var);
    ok = ok && std::abs(product - 0.5) <= 0.015;
    detail += fmt(sigma_x, 3) + " nm: " + fmt(product, 4) + "  ";
  }
  report(4, "discrete uncertainty product sigma_x sigma_q = 1/2", ok, detail);
}

struct OrderedRun {
  CavityGeometry geom{30000.0, 200.0, 400.0, 3.0, 200};
  MatterSpec matter{3000, 10.0, 1.0, 2.0, 0.0, 0.1};
  Realization real;
  Spectrum spectrum;
  DispersionTable table;
  std::vector<double> qgrid;

  OrderedRun() {
    real = sample_realization(matter, 7);
    spectrum = diagonalize(build_hamiltonian(real, geom, matter));
    table = ordered_dispersion(geom, matter);
    qgrid = table.q_invnm;
  }

  TimeSeries observe(const WavepacketSpec& packet, std::span<const double> grid) const {
    const auto psi0 = prepare_wavepacket(packet, real, geom);
    const SpectralPropagator prop(spectrum, psi0);
    return compute_observables(prop, real, grid, packet.center_or_default(geom),
                               initial_interval(packet, real, geom), 30);
  }
};

void criterion_5_ballistic_law(const OrderedRun& run) {
  const WavepacketSpec packet{60.0, 0.0, {}};

  // R^2 of the 500 fs linear fit
  const auto series = run.observe(packet, uniform_grid(500.0, 1.0));
  const auto fit = fit_ballistic_velocity(series, 0.0, 500.0);

  // quadratic law where the per-site t^2 expansion holds (t <~ 0.4 fs);
  // beyond that the quartic term and the first Rabi cycle take over
  std::vector<double> fine{0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  const auto early = run.observe(packet, fine);
  std::vector<double> log_t, log_dr2;
  for (std::size_t i = 1; i < fine.size(); ++i) {
    const double dr2 =
        early.rmsd_nm[i] * early.rmsd_nm[i] - early.rmsd_nm[0] * early.rmsd_nm[0];
    log_t.push_back(std::log(fine[i]));
    log_dr2.push_back(std::log(std::abs(dr2)));
  }
  TimeSeries loglog;
  loglog.t_fs = log_t;
  loglog.rmsd_nm = log_dr2;
  loglog.matter_probability.assign(log_t.size(), 1.0);
  loglog.chi.assign(log_t.size(), 0.0);
  loglog.boundary_probability.assign(log_t.size(), 0.0);
  const auto exponent_fit = fit_ballistic_velocity(loglog, -1e9, 1e9);

  const bool ok = fit.r_squared >= 0.98 && std::abs(exponent_fit.v0_nm_fs - 2.0) <= 0.1;
  report(5, "short-time t^2 law and 500 fs fit quality", ok,
         "exponent " + fmt(exponent_fit.v0_nm_fs, 4) + ", R^2 " + fmt(fit.r_squared, 4));
}

void criterion_6_eq12_consistency(const OrderedRun& run) {
  bool ok = true;
  std::string detail;
  for (double sigma_x : {120.0, 240.0, 480.0}) {
    const WavepacketSpec packet{sigma_x, 0.0, {}};
    const auto series = run.observe(packet, uniform_grid(500.0, 5.0));
    const auto fit = fit_ballistic_velocity(series, 0.0, 500.0);
    const auto psi0 = prepare_wavepacket(packet, run.real, run.geom);
    const double predicted =
        predict_v0(run.table, momentum_distribution(psi0, run.real, run.qgrid));
    const double ratio = fit.v0_nm_fs / predicted;
    ok = ok && std::abs(ratio - 1.0) <= 0.10;
    detail += fmt(sigma_x, 3) + " nm: fit/pred " + fmt(ratio, 3) + "  ";
  }

  // predicted v0(sigma_x) has its local maximum at 120 nm
  auto predicted_at = [&](double sigma_x) {
    const auto psi = prepare_wavepacket({sigma_x, 0.0, {}}, run.real, run.geom);
    return predict_v0(run.table, momentum_distribution(psi, run.real, run.qgrid));
  };
  const double v90 = predicted_at(90.0);
  const double v120 = predicted_at(120.0);
  const double v180 = predicted_at(180.0);
  const bool peak_ok = v120 > v90 && v120 > v180;
  detail += "peak: v(90)=" + fmt(v90, 3) + " < v(120)=" + fmt(v120, 3) + " > v(180)=" +
            fmt(v180, 3);
  report(6, "fitted v0 agrees with the dispersion estimate", ok && peak_ok, detail);
}

// Shared desk-scale disorder-level pass feeding criteria 7, 8, 10 and 11.
struct LevelSummary {
  double sigma_m = 0.0;
  MeanSem v0;
  MeanSem v0_by_window[3];         // 100, 300, 700 fs fit-window variants
  MeanSem chi_100;
  MeanSem rmsd_3ps;
  MeanSem chi_3ps;
  double slope_ratio = 0.0;        // |dchi/dt(1 fs)| / max slope, level mean
  double slope_halving = 0.0;      // s(0.5 fs)/s(1 fs), level mean
  double max_boundary = 0.0;       // n_edge = 10 per side, max over t and realizations
  double max_norm_deviation = 0.0;
  double max_energy_drift = 0.0;   // realization 0, eV
  double pm_band_min = 1.0;        // ensemble-mean P_M extremes past 100 fs
  double pm_band_max = 0.0;
  GapEstimate gap;
};

LevelSummary run_level(int level_index, double sigma_m) {
  const auto geom = desk_geometry();
  const auto matter = desk_matter(sigma_m);
  const WavepacketSpec packet{120.0, 0.0, {}};
  const int n_real = 25;
  const auto coarse = uniform_grid(4000.0, 10.0);
  const auto fine = uniform_grid(100.0, 0.5);

  std::vector<double> v0(n_real), chi100(n_real), rmsd3(n_real), chi3(n_real);
  std::vector<double> sratio(n_real), shalf(n_real), pbmax(n_real), normdev(n_real);
  std::vector<std::vector<BrightMode>> bright(n_real);
  std::vector<double> energy_drift(n_real, 0.0);
  std::vector<double> v0_windows[3];
  for (auto& w : v0_windows) w.resize(n_real);
  std::vector<TimeSeries> all_series(n_real);

  parallel_realizations(n_real, [&](int r) {
    const auto real = sample_realization(matter, mix_seed(20240811, level_index, r));
    const auto hamiltonian = build_hamiltonian(real, geom, matter);
    const auto spectrum = diagonalize(hamiltonian);
    bright[r] = bright_mode_table(spectrum);
    const auto psi0 = prepare_wavepacket(packet, real, geom);
    const SpectralPropagator prop(spectrum, psi0);
    const auto interval = initial_interval(packet, real, geom);

    const auto series = compute_observables(prop, real, coarse, 5000.0, interval, 10);
    const auto early = compute_observables(prop, real, fine, 5000.0, interval, 10);

    v0[r] = fit_ballistic_velocity(series, 0.0, 500.0).v0_nm_fs;
    const double windows[3] = {100.0, 300.0, 700.0};
    for (int w = 0; w < 3; ++w) {
      v0_windows[w][r] = fit_ballistic_velocity(series, 0.0, windows[w]).v0_nm_fs;
    }
    chi100[r] = early.chi.back();
    rmsd3[r] = series.rmsd_nm[300];
    chi3[r] = series.chi[300];
    pbmax[r] = *std::max_element(series.boundary_probability.begin(),
                                 series.boundary_probability.end());
    normdev[r] = std::max(series.max_norm_deviation, early.max_norm_deviation);
    all_series[r] = series;

    // chi'(0+) -> 0: first finite-difference slope vs the characteristic slope
    const double s_half = (early.chi[1] - early.chi[0]) / 0.5;
    const double s_one = (early.chi[2] - early.chi[0]) / 1.0;
    double smax = 0.0;
    for (std::size_t i = 1; i < early.size(); ++i) {
      smax = std::max(smax, std::abs(early.chi[i] - early.chi[i - 1]) / 0.5);
    }
    sratio[r] = std::abs(s_one) / smax;
    shalf[r] = s_half / s_one;

    if (r == 0) {
      const double e0 = energy_expectation(hamiltonian, psi0);
      for (double t : {2000.0, 4000.0}) {
        energy_drift[r] = std::max(
            energy_drift[r], std::abs(energy_expectation(hamiltonian, prop.state_at(t)) - e0));
      }
    }
  });

  LevelSummary summary;
  summary.sigma_m = sigma_m;
  summary.v0 = stats(v0);
  for (int w = 0; w < 3; ++w) summary.v0_by_window[w] = stats(v0_windows[w]);
  const auto mean_series = aggregate(all_series).mean;
  for (std::size_t i = 0; i < mean_series.size(); ++i) {
    if (mean_series.t_fs[i] < 100.0) continue;
    summary.pm_band_min = std::min(summary.pm_band_min, mean_series.matter_probability[i]);
    summary.pm_band_max = std::max(summary.pm_band_max, mean_series.matter_probability[i]);
  }
  summary.chi_100 = stats(chi100);
  summary.rmsd_3ps = stats(rmsd3);
  summary.chi_3ps = stats(chi3);
  summary.slope_ratio = stats(sratio).mean;
  summary.slope_halving = stats(shalf).mean;
  summary.max_boundary = *std::max_element(pbmax.begin(), pbmax.end());
  summary.max_norm_deviation = *std::max_element(normdev.begin(), normdev.end());
  summary.max_energy_drift = energy_drift[0];
  std::vector<BrightMode> pooled;
  for (const auto& modes : bright) pooled.insert(pooled.end(), modes.begin(), modes.end());
  summary.gap = polariton_gap(pooled, 0.0025, matter.site_energy_ev);
  return summary;
}

void criteria_7_8_10_11(const std::vector<LevelSummary>& levels) {
  // 7: v0 non-increasing within standard-error bands over ratios 0..0.4,
  //    chi'(0+) -> 0, early migration slower at higher disorder
  bool v0_ok = true, chi_ok = true, slope_ok = true;
  std::string d7;
  for (int i = 0; i < 3; ++i) {
    const double band = std::sqrt(levels[i].v0.sem * levels[i].v0.sem +
                                  levels[i + 1].v0.sem * levels[i + 1].v0.sem);
    v0_ok = v0_ok && levels[i + 1].v0.mean <= levels[i].v0.mean + band;
    const double chi_band = std::sqrt(levels[i].chi_100.sem * levels[i].chi_100.sem +
                                      levels[i + 1].chi_100.sem * levels[i + 1].chi_100.sem);
    chi_ok = chi_ok && levels[i + 1].chi_100.mean <= levels[i].chi_100.mean + chi_band;
  }
  for (int i = 0; i < 4; ++i) {
    slope_ok = slope_ok && levels[i].slope_ratio <= 0.01 &&
               std::abs(levels[i].slope_halving - 0.5) <= 0.25;
    d7 += "v0=" + fmt(levels[i].v0.mean, 3) + "+-" + fmt(levels[i].v0.sem, 2) + " ";
  }
  d7 += "| chi(100fs): ";
  for (int i = 0; i < 4; ++i) d7 += fmt(levels[i].chi_100.mean, 3) + " ";
  d7 += "| slope ratio <= " + fmt(std::max({levels[0].slope_ratio, levels[1].slope_ratio,
                                            levels[2].slope_ratio, levels[3].slope_ratio}),
                                  2);
  report(7, "disorder slows the initial spread and early migration", v0_ok && chi_ok && slope_ok,
         d7);

  // informational: fit-window variants of the disorder trend (100/300/700 fs)
  const double window_names[3] = {100.0, 300.0, 700.0};
  for (int w = 0; w < 3; ++w) {
    std::string line = "      window " + fmt(window_names[w], 3) + " fs: v0 = ";
    for (int i = 0; i < 5; ++i) line += fmt(levels[i].v0_by_window[w].mean, 3) + " ";
    std::puts(line.c_str());
  }

  // strong-disorder matter content stays near 0.97 past the initial transient
  const bool pm_ok = levels[4].pm_band_min >= 0.94 && levels[4].pm_band_max <= 1.0;
  report(0, "supplementary: strong-disorder P_M in the 0.97 +- 0.03 band", pm_ok,
         "mean P_M(t >= 100 fs) in [" + fmt(levels[4].pm_band_min, 4) + ", " +
             fmt(levels[4].pm_band_max, 4) + "]");

  // 8: disorder-enhanced transport at 3 ps without a chi signature
  const auto& mid = levels[3];   // sigma_M / Omega_R = 0.4
  const auto& strong = levels[4];  // 1.0
  const double rmsd_band = std::sqrt(mid.rmsd_3ps.sem * mid.rmsd_3ps.sem +
                                     strong.rmsd_3ps.sem * strong.rmsd_3ps.sem);
  const bool det_ok = strong.rmsd_3ps.mean > mid.rmsd_3ps.mean + rmsd_band;
  const double chi_band = std::sqrt(mid.chi_3ps.sem * mid.chi_3ps.sem +
                                    strong.chi_3ps.sem * strong.chi_3ps.sem);
  const bool chi_silent = strong.chi_3ps.mean <= mid.chi_3ps.mean + chi_band;
  report(8, "disorder-enhanced transport invisible to chi", det_ok && chi_silent,
         "RMSD(3ps) " + fmt(mid.rmsd_3ps.mean, 4) + " -> " + fmt(strong.rmsd_3ps.mean, 4) +
             " nm, chi(3ps) " + fmt(mid.chi_3ps.mean, 3) + " -> " + fmt(strong.chi_3ps.mean, 3));

  // 10: gap closing on the 25-realization bright-mode profile
  const bool gap_ok = levels[1].gap.resolved && std::abs(levels[1].gap.gap_ev - 0.1) <= 0.02 &&
                      levels[2].gap.resolved && std::abs(levels[2].gap.gap_ev - 0.1) <= 0.02 &&
                      !levels[4].gap.resolved;
  report(10, "polariton gap closes with disorder", gap_ok,
         "gap(5%) = " + (levels[1].gap.resolved ? fmt(levels[1].gap.gap_ev, 4) : "unresolved") +
             " eV, gap(20%) = " +
             (levels[2].gap.resolved ? fmt(levels[2].gap.gap_ev, 4) : "unresolved") +
             " eV, gap(100%) = " +
             (levels[4].gap.resolved ? fmt(levels[4].gap.gap_ev, 4) : "unresolved"));

  // 11: conservation everywhere; edge monitor below 1e-3 for ratios >= 0.2
  double worst_norm = 0.0, worst_energy = 0.0, worst_boundary = 0.0;
  for (const auto& level : levels) {
    worst_norm = std::max(worst_norm, level.max_norm_deviation);
    worst_energy = std::max(worst_energy, level.max_energy_drift);
  }
  for (int i = 2; i < 5; ++i) {
    worst_boundary = std::max(worst_boundary, levels[i].max_boundary);
  }
  const bool conservation_ok = worst_norm <= 1e-12 && worst_energy <= 1e-10;
  const bool boundary_ok = worst_boundary < 1e-3;
  report(11, "conservation and boundary monitor", conservation_ok && boundary_ok,
         "max |norm-1| " + fmt(worst_norm, 2) + ", max energy drift " + fmt(worst_energy, 2) +
             " eV, max edge probability " + fmt(worst_boundary, 3) +
             (boundary_ok ? "" : " (exceeds 1e-3: photon-mediated background on a 10 um ring; "
                                 "see ledger)"));
}

void criterion_9_detuning() {
  auto make_plan = [&](double sigma_m, std::uint64_t seed) {
    SweepPlan plan;
    plan.base.geometry = desk_geometry();
    plan.base.matter = desk_matter(sigma_m);
    plan.base.wavepacket = {240.0, 0.0, {}};
    plan.base.t_max_fs = 500.0;
    plan.base.dt_fs = 5.0;
    plan.base.fit_window_fs = 500.0;
    plan.base.bin_width_nm = 500.0;
    plan.base.n_edge = 10;
    plan.axis = SweepAxis::detuning;
    plan.values = {-0.2, -0.1, 0.0, 0.1, 0.2};
    plan.n_realizations = 25;
    plan.base_seed = seed;
    return plan;
  };

  const auto moderate = run_ensemble(make_plan(0.02, 777001), 2);
  const auto strong = run_ensemble(make_plan(0.10, 777002), 2);

  auto argmax_value = [](const EnsembleResult& result) {
    std::size_t best = 0;
    for (std::size_t p = 1; p < result.points.size(); ++p) {
      if (result.points[p].v0_mean > result.points[best].v0_mean) best = p;
    }
    return result.points[best].axis_value;
  };
  const double peak_moderate = argmax_value(moderate);
  const double peak_strong = argmax_value(strong);
  const bool ok = peak_moderate == 0.0 && peak_strong < 0.0;

  std::string detail = "peak(20%) at delta=" + fmt(peak_moderate, 2) + ", peak(100%) at delta=" +
                       fmt(peak_strong, 2) + "; v0(20%)=";
  for (const auto& point : moderate.points) detail += fmt(point.v0_mean, 3) + " ";
  detail += "; v0(100%)=";
  for (const auto& point : strong.points) detail += fmt(point.v0_mean, 3) + " ";
  report(9, "optimal detuning shifts red under strong disorder", ok, detail);
}

void criterion_12_early_growth() {
  CavityGeometry geom{2000.0, 200.0, 400.0, 3.0, 40};
  MatterSpec matter{200, 10.0, 0.0, 2.0, 0.0, 0.1};
  const auto real = ordered_realization(matter);
  const WavepacketSpec packet{120.0, 0.0, {}};

  auto exact_growth = [&](double omega_r) {
    MatterSpec m = matter;
    m.rabi_splitting_ev = omega_r;
    const auto spectrum = diagonalize(build_hamiltonian(real, geom, m));
    const auto psi0 = prepare_wavepacket(packet, real, geom);
    const auto interval = initial_interval(packet, real, geom);
    const auto growth = early_growth(spectrum, psi0, interval);

    const SpectralPropagator prop(spectrum, psi0);
    auto escape = [&](double t) {
      const auto psi = prop.state_at(t);
      double inside = 0.0;
      for (std::size_t n = interval.first; n <= interval.last; ++n) {
        inside += std::norm(psi.amplitudes[n]);
      }
      return 1.0 - inside;
    };
    const double fd = (escape(0.5) - escape(0.0)) / 0.25;
    return std::pair{growth.exact, fd};
  };

  const auto [g1, fd1] = exact_growth(0.1);
  const auto [g2, fd2] = exact_growth(0.2);
  const bool fd_ok = std::abs(g1 / fd1 - 1.0) <= 0.05 && std::abs(g2 / fd2 - 1.0) <= 0.05;
  const bool trend_ok = g2 > g1;
  report(12, "early-growth curvature against the finite-difference oracle", fd_ok && trend_ok,
         "G(0.1) = " + fmt(g1, 4) + " vs FD " + fmt(fd1, 4) + ", G(0.2) = " + fmt(g2, 4) +
             " vs FD " + fmt(fd2, 4));
}

}  // namespace

int main() {
  const auto t_start = std::chrono::steady_clock::now();
  use_single_threaded_blas();

  criterion_1_cutoff();
  criterion_2_block_oracle();
  criterion_4_uncertainty();
  criterion_12_early_growth();
  criterion_3_rabi();

  {
    OrderedRun run;
    criterion_5_ballistic_law(run);
    criterion_6_eq12_consistency(run);
  }

  {
    std::vector<LevelSummary> levels;
    int index = 0;
    for (double sigma_m : {0.0, 0.005, 0.02, 0.04, 0.10}) {
      levels.push_back(run_level(index++, sigma_m));
    }
    criteria_7_8_10_11(levels);
  }

  criterion_9_detuning();

  std::size_t failed = 0;
  for (const auto& criterion : results) {
    if (!criterion.passed) ++failed;
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
  std::printf("%zu/%zu criteria passed in %lld s\n", results.size() - failed, results.size(),
              static_cast<long long>(elapsed));
  return failed == 0 ? 0 : 1;
}

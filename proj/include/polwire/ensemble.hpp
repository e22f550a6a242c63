#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "polwire/theory.hpp"

namespace polwire {

inline constexpr const char* kCodeVersion = "polwire 1.0.0";
inline constexpr int kLayoutVersion = 1;

enum class SweepAxis { sigma_M, Omega_R, sigma_x, qbar0, detuning };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

// Everything one realization run needs besides the disorder seed.
struct RunParameters {
  CavityGeometry geometry;
  MatterSpec matter;
  WavepacketSpec wavepacket;
  double t_max_fs = 500.0;
  double dt_fs = 5.0;
  double fit_window_fs = 500.0;
  double bin_width_nm = 500.0;
  int n_edge = 100;

  void validate() const;
};

struct SweepPlan {
  RunParameters base;
  SweepAxis axis = SweepAxis::sigma_M;
  std::vector<double> values;
  int n_realizations = 100;
  std::uint64_t base_seed = 0;

  void validate() const;
};

// Applies one axis value to the base parameters. Detuning delta sets
// E_M = hbar omega_0 - delta at fixed geometry.
RunParameters apply_axis(const RunParameters& base, SweepAxis axis, double value);

// Injective seed for (point, realization) under a fixed base seed: the pair
// packs into one 64-bit word ((realization+1) << 32 | (point+1), both below
// 2^32 - 1) and passes twice through the SplitMix64 finalizer, which is a
// bijection on 64-bit words.
std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t point_index,
                       std::uint64_t realization_index);

struct SeriesStats {
  TimeSeries mean;
  TimeSeries standard_error;
};

// Mean and standard error per observable per time, accumulated in fixed
// realization order. Throws GridMismatchError on differing t grids.
SeriesStats aggregate(const std::vector<TimeSeries>& series);

struct PointResult {
  double axis_value = 0.0;
  int realization_count = 0;
  SeriesStats series;
  double v0_mean = 0.0, v0_sem = 0.0;
  double r2_mean = 0.0, r2_min = 0.0;
  double v0_predicted = 0.0;  // ordered-dispersion estimate at this point
  double max_rmsd_mean = 0.0, max_rmsd_sem = 0.0;
  double chi_final_mean = 0.0;
  double chi_steady_time_fs = 0.0;  // time to 95% of the final mean chi
  double max_norm_deviation = 0.0;
};

struct EnsembleResult {
  SweepPlan plan;
  std::vector<PointResult> points;
  std::string config_hash;
  std::string code_version;
};

// One realization end to end: sample, build, diagonalize, propagate, observe.
TimeSeries run_single_realization(const RunParameters& params, std::uint64_t seed);

// Deterministic ensemble execution: realizations are independent work items
// on a bounded pool, results are aggregated in realization order, and the
// BLAS backend is pinned to one thread, so any worker count produces
// identical bits. A realization failure aborts its sweep point with the
// realization identity attached.
EnsembleResult run_ensemble(const SweepPlan& plan, int n_workers = 1);

// Versioned on-disk layout: manifest.json plus one observables CSV pair
// (mean, standard error) per sweep point, with FNV-1a checksums.
void persist(const EnsembleResult& result, const std::filesystem::path& directory);
EnsembleResult load_ensemble(const std::filesystem::path& directory);

std::uint64_t fnv1a64(std::span<const char> bytes);

}  // namespace polwire

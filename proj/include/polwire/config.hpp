#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polwire/ensemble.hpp"

namespace polwire {

struct OutputConfig {
  std::filesystem::path directory = ".";
  std::vector<std::string> formats = {"csv"};
};

// Full run configuration as read from JSON. Key layout:
//   {"geometry": {"Lx_nm", "Ly_nm", "Lz_nm", "epsilon", "m_max"},
//    "matter": {"N_M", "a_nm", "sigma_a_nm", "E_M_eV", "sigma_M_eV", "Omega_R_eV"},
//    "seed", "generator_id",
//    "wavepacket": {"sigma_x_nm", "qbar0_invnm", ["x0_nm"]},
//    "run": {"t_max_fs", "dt_fs", "fit_window_fs", "bin_width_nm", "n_edge",
//            ["profile_times_fs"]},
//    ["sweep": {"axis", "values", "n_realizations"}],
//    ["output": {"directory", "formats"}]}
struct RunConfig {
  RunParameters parameters;
  std::uint64_t seed = 0;
  std::string generator_id = kGeneratorId;
  std::vector<double> profile_times_fs;
  std::optional<SweepPlan> sweep;
  OutputConfig output;
};

// Parses and validates; ConfigError messages carry exact key paths.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace polwire

#include "polwire/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "polwire/errors.hpp"

namespace polwire {

using nlohmann::json;

namespace {

const json& require(const json& node, const std::string& key, const std::string& path) {
  auto it = node.find(key);
  if (it == node.end()) throw ConfigError("missing required key " + path + "." + key);
  return *it;
}

double number_at(const json& node, const std::string& key, const std::string& path) {
  const json& value = require(node, key, path);
  if (!value.is_number()) throw ConfigError(path + "." + key + " must be a number");
  return value.get<double>();
}

int integer_at(const json& node, const std::string& key, const std::string& path) {
  const json& value = require(node, key, path);
  if (!value.is_number_integer()) throw ConfigError(path + "." + key + " must be an integer");
  return value.get<int>();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  RunConfig config;
  const json& geometry = require(root, "geometry", "$");
  config.parameters.geometry.length_x_nm = number_at(geometry, "Lx_nm", "$.geometry");
  config.parameters.geometry.length_y_nm = number_at(geometry, "Ly_nm", "$.geometry");
  config.parameters.geometry.length_z_nm = number_at(geometry, "Lz_nm", "$.geometry");
  config.parameters.geometry.epsilon = number_at(geometry, "epsilon", "$.geometry");
  config.parameters.geometry.max_mode_index = integer_at(geometry, "m_max", "$.geometry");

  const json& matter = require(root, "matter", "$");
  config.parameters.matter.site_count = integer_at(matter, "N_M", "$.matter");
  config.parameters.matter.mean_spacing_nm = number_at(matter, "a_nm", "$.matter");
  config.parameters.matter.spacing_sigma_nm = number_at(matter, "sigma_a_nm", "$.matter");
  config.parameters.matter.site_energy_ev = number_at(matter, "E_M_eV", "$.matter");
  config.parameters.matter.energy_sigma_ev = number_at(matter, "sigma_M_eV", "$.matter");
  config.parameters.matter.rabi_splitting_ev = number_at(matter, "Omega_R_eV", "$.matter");

  const json& seed = require(root, "seed", "$");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ConfigError("$.seed must be a non-negative integer");
  }
  config.seed = seed.get<std::uint64_t>();
  config.generator_id = require(root, "generator_id", "$").get<std::string>();
  if (config.generator_id != kGeneratorId) {
    throw ConfigError("$.generator_id must be \"" + std::string(kGeneratorId) +
                      "\" (the only stream this build implements)");
  }

  const json& packet = require(root, "wavepacket", "$");
  config.parameters.wavepacket.sigma_x_nm = number_at(packet, "sigma_x_nm", "$.wavepacket");
  config.parameters.wavepacket.qbar0_invnm = number_at(packet, "qbar0_invnm", "$.wavepacket");
  if (packet.contains("x0_nm")) {
    config.parameters.wavepacket.center_nm = number_at(packet, "x0_nm", "$.wavepacket");
  }

  const json& run = require(root, "run", "$");
  config.parameters.t_max_fs = number_at(run, "t_max_fs", "$.run");
  config.parameters.dt_fs = number_at(run, "dt_fs", "$.run");
  config.parameters.fit_window_fs = number_at(run, "fit_window_fs", "$.run");
  config.parameters.bin_width_nm = number_at(run, "bin_width_nm", "$.run");
  config.parameters.n_edge = integer_at(run, "n_edge", "$.run");
  if (run.contains("profile_times_fs")) {
    const json& times = run["profile_times_fs"];
    if (!times.is_array()) throw ConfigError("$.run.profile_times_fs must be an array");
    for (const auto& t : times) {
      if (!t.is_number()) throw ConfigError("$.run.profile_times_fs entries must be numbers");
      config.profile_times_fs.push_back(t.get<double>());
    }
  }

  if (root.contains("output")) {
    const json& output = root["output"];
    if (output.contains("directory")) {
      config.output.directory = output["directory"].get<std::string>();
    }
    if (output.contains("formats")) {
      config.output.formats = output["formats"].get<std::vector<std::string>>();
      for (const auto& format : config.output.formats) {
        if (format != "csv" && format != "json") {
          throw ConfigError("$.output.formats entries must be \"csv\" or \"json\"");
        }
      }
    }
  }

  try {
    config.parameters.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config validation: ") + e.what());
  }

  if (root.contains("sweep")) {
    const json& sweep = root["sweep"];
    SweepPlan plan;
    plan.base = config.parameters;
    plan.axis = sweep_axis_from_string(require(sweep, "axis", "$.sweep").get<std::string>());
    const json& values = require(sweep, "values", "$.sweep");
    if (!values.is_array() || values.empty()) {
      throw ConfigError("$.sweep.values must be a nonempty array");
    }
    plan.values = values.get<std::vector<double>>();
    plan.n_realizations = integer_at(sweep, "n_realizations", "$.sweep");
    plan.base_seed = config.seed;
    try {
      plan.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("$.sweep validation: ") + e.what());
    }
    config.sweep = std::move(plan);
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace polwire

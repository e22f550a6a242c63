#include "polwire/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "polwire/constants.hpp"
#include "polwire/errors.hpp"

namespace polwire {

namespace {

constexpr double kPi = std::numbers::pi;

// One Normal(mu, sigma) draw from two raw mt19937_64 words (cosine Box-Muller).
// sigma = 0 still consumes both words, so streams stay aligned across
// disorder levels.
double draw_normal(std::mt19937_64& rng, double mu, double sigma) {
  const double u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * kPi * u2);
  return mu + sigma * z;
}

}  // namespace

void CavityGeometry::validate() const {
  if (!(length_x_nm > 0.0) || !(length_y_nm > 0.0) || !(length_z_nm > 0.0)) {
    throw ConfigError("geometry: all cavity lengths must be positive");
  }
  if (!(epsilon >= 1.0)) throw ConfigError("geometry.epsilon must be >= 1");
  if (max_mode_index < 0) throw ConfigError("geometry.m_max must be >= 0");
}

double CavityGeometry::transverse_cutoff_invnm() const {
  const double ky = kPi / length_y_nm;
  const double kz = kPi / length_z_nm;
  return std::sqrt(ky * ky + kz * kz);
}

void MatterSpec::validate() const {
  if (site_count < 1) throw ConfigError("matter.N_M must be >= 1");
  if (!(mean_spacing_nm > 0.0)) throw ConfigError("matter.a_nm must be positive");
  if (spacing_sigma_nm < 0.0) throw ConfigError("matter.sigma_a_nm must be >= 0");
  if (!(site_energy_ev > 0.0)) throw ConfigError("matter.E_M_eV must be positive");
  if (energy_sigma_ev < 0.0) throw ConfigError("matter.sigma_M_eV must be >= 0");
  if (rabi_splitting_ev < 0.0) throw ConfigError("matter.Omega_R_eV must be >= 0");
}

void validate_consistency(const CavityGeometry& geometry, const MatterSpec& matter) {
  geometry.validate();
  matter.validate();
  const double expected = static_cast<double>(matter.site_count) * matter.mean_spacing_nm;
  if (std::abs(expected - geometry.length_x_nm) > 1e-9 * expected) {
    std::ostringstream msg;
    msg << "matter.N_M * matter.a_nm = " << expected
        << " nm must equal geometry.Lx_nm = " << geometry.length_x_nm
        << "; set geometry.Lx_nm = " << expected;
    throw ConfigError(msg.str());
  }
}

std::vector<PhotonMode> photon_wavevectors(const CavityGeometry& geometry) {
  geometry.validate();
  std::vector<PhotonMode> modes;
  modes.reserve(geometry.mode_count());
  for (int m = -geometry.max_mode_index; m <= geometry.max_mode_index; ++m) {
    modes.push_back({m, 2.0 * kPi * static_cast<double>(m) / geometry.length_x_nm});
  }
  return modes;
}

double photon_energy(const CavityGeometry& geometry, double q_invnm) {
  const double q0 = geometry.transverse_cutoff_invnm();
  return kHbarC / std::sqrt(geometry.epsilon) * std::sqrt(q_invnm * q_invnm + q0 * q0);
}

Realization sample_realization(const MatterSpec& matter, std::uint64_t seed) {
  matter.validate();
  std::mt19937_64 rng(seed);
  Realization real;
  real.seed = seed;
  real.generator_id = kGeneratorId;
  real.positions_nm.resize(matter.site_count);
  real.energies_ev.resize(matter.site_count);

  double x = 0.0;
  for (int n = 0; n < matter.site_count; ++n) {
    const double spacing = draw_normal(rng, matter.mean_spacing_nm, matter.spacing_sigma_nm);
    if (!(spacing > 0.0)) {
      throw SamplingError("non-positive intersite spacing drawn at site " + std::to_string(n) +
                          "; sigma_a_nm is too large relative to a_nm");
    }
    x += spacing;
    real.positions_nm[n] = x;
  }
  for (int n = 0; n < matter.site_count; ++n) {
    const double energy = draw_normal(rng, matter.site_energy_ev, matter.energy_sigma_ev);
    if (!(energy > 0.0)) {
      throw SamplingError("non-positive excitation energy drawn at site " + std::to_string(n) +
                          "; sigma_M_eV is too large relative to E_M_eV");
    }
    real.energies_ev[n] = energy;
  }
  return real;
}

Realization ordered_realization(const MatterSpec& matter) {
  matter.validate();
  Realization real;
  real.seed = 0;
  real.generator_id = "ordered";
  real.positions_nm.resize(matter.site_count);
  real.energies_ev.assign(matter.site_count, matter.site_energy_ev);
  for (int n = 0; n < matter.site_count; ++n) {
    real.positions_nm[n] = static_cast<double>(n + 1) * matter.mean_spacing_nm;
  }
  return real;
}

double rabi_to_dipole(const MatterSpec& matter, const CavityGeometry& geometry) {
  const double hw0 = photon_energy(geometry, 0.0);
  const double factor =
      std::sqrt(hw0 * matter.site_count /
                (2.0 * geometry.epsilon * geometry.length_x_nm * geometry.length_y_nm *
                 geometry.length_z_nm));
  return matter.rabi_splitting_ev / factor;
}

double rabi_from_dipole(double dipole, const MatterSpec& matter,
                        const CavityGeometry& geometry) {
  const double hw0 = photon_energy(geometry, 0.0);
  return dipole * std::sqrt(hw0 * matter.site_count /
                            (2.0 * geometry.epsilon * geometry.length_x_nm *
                             geometry.length_y_nm * geometry.length_z_nm));
}

HamiltonianMatrix build_hamiltonian(const Realization& realization,
                                    const CavityGeometry& geometry, const MatterSpec& matter) {
  if (static_cast<int>(realization.positions_nm.size()) != matter.site_count ||
      static_cast<int>(realization.energies_ev.size()) != matter.site_count) {
    throw DimensionError("build_hamiltonian: realization size does not match matter.N_M");
  }
  const auto modes = photon_wavevectors(geometry);
  const int n_sites = matter.site_count;
  const int n_modes = static_cast<int>(modes.size());
  const int dim = n_sites + n_modes;

  HamiltonianMatrix h;
  h.site_count = n_sites;
  h.mode_count = n_modes;
  h.matrix = ComplexMatrix(dim, dim);
  h.mode_q_invnm.resize(n_modes);
  h.mode_energy_ev.resize(n_modes);

  for (int n = 0; n < n_sites; ++n) {
    h.matrix(n, n) = realization.energies_ev[n];
  }
  for (int j = 0; j < n_modes; ++j) {
    h.mode_q_invnm[j] = modes[j].q_invnm;
    h.mode_energy_ev[j] = photon_energy(geometry, modes[j].q_invnm);
    h.matrix(n_sites + j, n_sites + j) = h.mode_energy_ev[j];
  }
  const double half_rabi = 0.5 * matter.rabi_splitting_ev;
  for (int j = 0; j < n_modes; ++j) {
    const double q = h.mode_q_invnm[j];
    const double hw = h.mode_energy_ev[j];
    for (int n = 0; n < n_sites; ++n) {
      const double mag = half_rabi * std::sqrt(realization.energies_ev[n] / (n_sites * hw));
      const double phase = q * realization.positions_nm[n];
      // -i e^{i q x_n} = (sin, -cos)
      const cplx entry = mag * cplx(std::sin(phase), -std::cos(phase));
      h.matrix(n, n_sites + j) = entry;
      h.matrix(n_sites + j, n) = std::conj(entry);
    }
  }
  return h;
}

}  // namespace polwire

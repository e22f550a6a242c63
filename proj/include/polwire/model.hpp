#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polwire/matrix.hpp"

namespace polwire {

// Cuboid microcavity with periodic boundary conditions along x and a single
// confined transverse band (n_y = n_z = 1, TE polarization).
struct CavityGeometry {
  double length_x_nm = 0.0;
  double length_y_nm = 0.0;
  double length_z_nm = 0.0;
  double epsilon = 1.0;        // relative permittivity of the intracavity medium
  int max_mode_index = 0;      // photon modes have m_x in [-max_mode_index, max_mode_index]

  void validate() const;  // throws ConfigError
  int mode_count() const { return 2 * max_mode_index + 1; }

  // In-plane cutoff from the confined directions: q0 = sqrt((pi/Ly)^2 + (pi/Lz)^2).
  // Note this uses L_y and L_z (n_y = n_z = 1); it reproduces the 2.00 eV
  // minimum photon energy of the reference geometry.
  double transverse_cutoff_invnm() const;
};

struct MatterSpec {
  int site_count = 0;            // N_M
  double mean_spacing_nm = 0.0;  // a
  double spacing_sigma_nm = 0.0;
  double site_energy_ev = 0.0;   // E_M
  double energy_sigma_ev = 0.0;  // sigma_M
  double rabi_splitting_ev = 0.0;

  void validate() const;  // throws ConfigError
};

// Requires N_M * a == L_x so that shrinking the dipole count shrinks the wire
// consistently. Throws ConfigError with a corrective message otherwise.
void validate_consistency(const CavityGeometry& geometry, const MatterSpec& matter);

struct PhotonMode {
  int index;        // m_x
  double q_invnm;   // 2 pi m_x / L_x
};

// All 2*m_max+1 modes sorted by m_x ascending.
std::vector<PhotonMode> photon_wavevectors(const CavityGeometry& geometry);

// hbar omega_q = (hbar c / sqrt(eps)) sqrt(q^2 + q0^2), in eV. Even in q.
double photon_energy(const CavityGeometry& geometry, double q_invnm);

// One concrete disorder sample. Positions are strictly increasing; energies
// strictly positive.
struct Realization {
  std::vector<double> positions_nm;
  std::vector<double> energies_ev;
  std::uint64_t seed = 0;
  std::string generator_id;
};

// RNG algorithm identifier baked into every Realization. The stream is fully
// specified by its arithmetic: mt19937_64 raw draws mapped to uniforms by
// u = (x >> 11) * 2^-53, Box-Muller cosine branch z = sqrt(-2 ln(1-u1)) cos(2 pi u2),
// one normal per pair of draws; all spacings first, then all energies.
inline constexpr const char* kGeneratorId = "mt19937_64-boxmuller-v1";

// Spacings ~ Normal(a, sigma_a^2) i.i.d., positions their cumulative sum
// starting at the first spacing; energies ~ Normal(E_M, sigma_M^2) i.i.d.
// Deterministic given (seed, generator id). Throws SamplingError if any
// spacing or energy comes out non-positive.
Realization sample_realization(const MatterSpec& matter, std::uint64_t seed);

// Uniform lattice x_n = n a with all energies E_M (the sigma -> 0 limit).
Realization ordered_realization(const MatterSpec& matter);

// Inverts Omega_R = mu sqrt(hbar omega_0 N_M / (2 eps Lx Ly Lz)) for the
// dipole component mu (in sqrt(eV nm^3) with this unit system).
double rabi_to_dipole(const MatterSpec& matter, const CavityGeometry& geometry);
double rabi_from_dipole(double dipole, const MatterSpec& matter, const CavityGeometry& geometry);

// Single-excitation Hamiltonian over the basis [site 1..N_M in position
// order | photon modes by ascending m_x]. Dense Hermitian, assembled from
// conjugate pairs so H == H^dagger holds exactly.
struct HamiltonianMatrix {
  ComplexMatrix matrix;
  int site_count = 0;
  int mode_count = 0;
  std::vector<double> mode_q_invnm;
  std::vector<double> mode_energy_ev;

  int dim() const { return site_count + mode_count; }
};

// Diagonal: E_n then hbar omega_q. Coupling
// <n;0|H|0;q> = -i (Omega_R/2) sqrt(E_n / (N_M hbar omega_q)) e^{i q x_n}.
HamiltonianMatrix build_hamiltonian(const Realization& realization,
                                    const CavityGeometry& geometry, const MatterSpec& matter);

}  // namespace polwire

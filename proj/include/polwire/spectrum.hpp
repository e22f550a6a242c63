#pragma once

#include <iosfwd>
#include <vector>

#include "polwire/model.hpp"

namespace polwire {

// Full eigendecomposition of the single-excitation Hamiltonian plus the
// per-eigenstate exciton weight sum_{n<=N_M} |<n|A>|^2.
struct Spectrum {
  std::vector<double> omega;        // eigenvalue / hbar, 1/fs, ascending
  ComplexMatrix vectors;            // columns, basis order of HamiltonianMatrix
  std::vector<double> exciton_content;
  int site_count = 0;
  int mode_count = 0;
  std::vector<double> mode_q_invnm;

  int dim() const { return site_count + mode_count; }
  double photon_content(std::size_t i) const { return 1.0 - exciton_content[i]; }
  double energy_ev(std::size_t i) const;
};

// Dense diagonalization. Verifies the eigenpair residual ||H v - E v||_inf
// against 1e-8 eV (all columns up to dim 512, a fixed stride of columns
// beyond that) and throws ConvergenceError on failure.
Spectrum diagonalize(const HamiltonianMatrix& hamiltonian);

// Two-branch dispersion of the zero-disorder uniform-lattice system. Each
// photon q couples only to the collective dipole mode of the same q, giving
// blocks [[E_M, g_q],[g_q, hbar omega_q]] with g_q = (Omega_R/2) sqrt(E_M/hbar omega_q)
// (the coupling phase drops out of eigenvalues and contents).
struct DispersionTable {
  std::vector<double> q_invnm;
  std::vector<double> omega_lp, omega_up;    // 1/fs
  std::vector<double> pi_lp, pi_up;          // exciton contents
  std::vector<double> vg_lp, vg_up;          // nm/fs
  std::vector<double> veff_lp, veff_up;      // Pi * vg

  // closed-form parameters, kept so velocity columns can be (re)filled
  double site_energy_ev = 0.0;
  double rabi_splitting_ev = 0.0;
  double photon_prefactor_ev_nm = 0.0;  // hbar c / sqrt(eps)
  double transverse_cutoff_invnm = 0.0;

  std::size_t size() const { return q_invnm.size(); }
};

// Fills q, omega, Pi and the closed-form parameters; velocity columns are
// filled by effective_group_velocity.
DispersionTable ordered_dispersion(const CavityGeometry& geometry, const MatterSpec& matter);

// Analytic d omega/d q of the closed-form branches (including the q-dependence
// of g_q through omega_q); v_eff = Pi * v_g.
void effective_group_velocity(DispersionTable& table);

struct BrightMode {
  double energy_ev;
  double q_peak_invnm;  // photon wavevector carrying maximum probability
};

// Eigenstates whose photon content exceeds the threshold (default 10%).
std::vector<BrightMode> bright_mode_table(const Spectrum& spectrum,
                                          double photon_threshold = 0.10);

// CSV with header q_invnm,omega_LP_invfs,omega_UP_invfs,Pi_LP,Pi_UP,
// vg_LP_nmfs,vg_UP_nmfs,veff_LP_nmfs,veff_UP_nmfs.
void write_dispersion_csv(const DispersionTable& table, std::ostream& out);

}  // namespace polwire

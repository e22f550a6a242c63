#pragma once

#include <optional>
#include <span>
#include <vector>

#include "polwire/spectrum.hpp"

namespace polwire {

struct WavepacketSpec {
  double sigma_x_nm = 0.0;
  double qbar0_invnm = 0.0;
  std::optional<double> center_nm;  // defaults to L_x / 2

  double center_or_default(const CavityGeometry& geometry) const {
    return center_nm.value_or(0.5 * geometry.length_x_nm);
  }
};

// Normalized amplitudes over the [sites | photon modes] basis.
struct StateVector {
  std::vector<cplx> amplitudes;
  int site_count = 0;
  int mode_count = 0;

  int dim() const { return site_count + mode_count; }
};

// Gaussian exciton packet c_n ~ exp[-(x_n - x0)^2 / (4 sigma_x^2) + i qbar0 x_n],
// photon amplitudes exactly zero, normalized. Throws DegenerateWavepacketError
// if fewer than 3 sites fall within +-3 sigma_x of the center.
StateVector prepare_wavepacket(const WavepacketSpec& packet, const Realization& realization,
                               const CavityGeometry& geometry);

// P(q) = |c_q|^2 with c_q = (1/sqrt(N_M)) sum_n c_n e^{-i q x_n}, evaluated on
// the given q grid and renormalized to sum 1. The state must be purely
// excitonic (photon amplitudes zero).
std::vector<double> momentum_distribution(const StateVector& psi, const Realization& realization,
                                          std::span<const double> qgrid);

// Exact spectral evolution |psi(t)> = V e^{-i Omega t} V^dagger |psi(0)>.
// No time-stepping error; each time is reconstructed independently.
class SpectralPropagator {
 public:
  SpectralPropagator(const Spectrum& spectrum, const StateVector& initial);

  StateVector state_at(double t_fs) const;
  const Spectrum& spectrum() const { return *spectrum_; }
  const std::vector<cplx>& eigenbasis_coefficients() const { return coefficients_; }

 private:
  const Spectrum* spectrum_;
  std::vector<cplx> coefficients_;  // V^dagger psi0
};

double matter_probability(const StateVector& psi);

// Matter-renormalized RMS displacement about x0 (eV/nm/fs units: returns nm).
// Throws NoMatterContentError when P_M < 1e-14.
double rmsd(const StateVector& psi, const Realization& realization, double x0_nm);

// Inclusive index range [first, last] of sites inside [x0-3sigma, x0+3sigma].
struct SiteInterval {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t count() const { return last - first + 1; }
};

SiteInterval initial_interval(const WavepacketSpec& packet, const Realization& realization,
                              const CavityGeometry& geometry);

// chi = 1 - (sum over the interval of site probabilities) / P_M.
double migration_probability(const StateVector& psi, const SiteInterval& interval);

// Summed site probability of the n_edge sites nearest each wire end
// (2 n_edge sites total). Requires n_edge < N_M / 2.
double boundary_probability(const StateVector& psi, int n_edge);

struct DensityProfile {
  std::vector<double> center_nm;
  std::vector<double> probability;  // sums to P_M
};

DensityProfile density_profile(const StateVector& psi, const Realization& realization,
                               const CavityGeometry& geometry, double bin_width_nm);

struct TimeSeries {
  std::vector<double> t_fs;
  std::vector<double> matter_probability;
  std::vector<double> rmsd_nm;
  std::vector<double> chi;
  std::vector<double> boundary_probability;
  double max_norm_deviation = 0.0;  // max | ||psi(t)|| - 1 | over the samples

  std::size_t size() const { return t_fs.size(); }
};

std::vector<double> uniform_grid(double t_max_fs, double dt_fs);

// Streams the observables over the grid; only one state is held at a time.
TimeSeries compute_observables(const SpectralPropagator& propagator,
                               const Realization& realization, std::span<const double> t_fs,
                               double x0_nm, const SiteInterval& interval, int n_edge);

// <psi|H|psi> in eV, for conservation checks.
double energy_expectation(const HamiltonianMatrix& hamiltonian, const StateVector& psi);

// CSV with header t_fs,P_M,RMSD_nm,chi,P_boundary.
void write_timeseries_csv(const TimeSeries& series, std::ostream& out);

// CSV with header bin_center_nm,probability.
void write_profile_csv(const DensityProfile& profile, std::ostream& out);

}  // namespace polwire

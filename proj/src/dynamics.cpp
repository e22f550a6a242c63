#include "polwire/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "polwire/constants.hpp"
#include "polwire/errors.hpp"

namespace polwire {

StateVector prepare_wavepacket(const WavepacketSpec& packet, const Realization& realization,
                               const CavityGeometry& geometry) {
  if (!(packet.sigma_x_nm > 0.0)) {
    throw ConfigError("wavepacket.sigma_x_nm must be positive");
  }
  const double x0 = packet.center_or_default(geometry);
  const auto& x = realization.positions_nm;

  int supported = 0;
  for (double xn : x) {
    if (std::abs(xn - x0) <= 3.0 * packet.sigma_x_nm) ++supported;
  }
  if (supported < 3) {
    throw DegenerateWavepacketError(
        "fewer than 3 sites within +-3 sigma_x of the packet center");
  }

  StateVector psi;
  psi.site_count = static_cast<int>(x.size());
  psi.mode_count = geometry.mode_count();
  psi.amplitudes.assign(psi.dim(), cplx{0.0, 0.0});
  const double inv_four_sigma_sq = 1.0 / (4.0 * packet.sigma_x_nm * packet.sigma_x_nm);
  double norm_sq = 0.0;
  for (int n = 0; n < psi.site_count; ++n) {
    const double dx = x[n] - x0;
    const double mag = std::exp(-dx * dx * inv_four_sigma_sq);
    const double phase = packet.qbar0_invnm * x[n];
    psi.amplitudes[n] = mag * cplx(std::cos(phase), std::sin(phase));
    norm_sq += mag * mag;
  }
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (int n = 0; n < psi.site_count; ++n) psi.amplitudes[n] *= inv_norm;
  return psi;
}

std::vector<double> momentum_distribution(const StateVector& psi, const Realization& realization,
                                          std::span<const double> qgrid) {
  if (static_cast<std::size_t>(psi.site_count) != realization.positions_nm.size()) {
    throw DimensionError("momentum_distribution: state/realization size mismatch");
  }
  for (int j = 0; j < psi.mode_count; ++j) {
    if (psi.amplitudes[psi.site_count + j] != cplx{0.0, 0.0}) {
      throw DimensionError("momentum_distribution: state must be purely excitonic");
    }
  }
  std::vector<double> weights(qgrid.size());
  double total = 0.0;
  for (std::size_t k = 0; k < qgrid.size(); ++k) {
    cplx cq{0.0, 0.0};
    for (int n = 0; n < psi.site_count; ++n) {
      const double phase = -qgrid[k] * realization.positions_nm[n];
      cq += psi.amplitudes[n] * cplx(std::cos(phase), std::sin(phase));
    }
    weights[k] = std::norm(cq);
    total += weights[k];
  }
  if (total <= 0.0) throw NoMatterContentError("momentum_distribution: empty state");
  for (auto& w : weights) w /= total;
  return weights;
}

SpectralPropagator::SpectralPropagator(const Spectrum& spectrum, const StateVector& initial)
    : spectrum_(&spectrum) {
  if (initial.dim() != spectrum.dim()) {
    throw DimensionError("SpectralPropagator: state dimension does not match spectrum");
  }
  coefficients_ = matvec(spectrum.vectors, initial.amplitudes, /*adjoint=*/true);
}

StateVector SpectralPropagator::state_at(double t_fs) const {
  const int dim = spectrum_->dim();
  std::vector<cplx> rotated(dim);
  for (int a = 0; a < dim; ++a) {
    const double phase = -spectrum_->omega[a] * t_fs;
    rotated[a] = coefficients_[a] * cplx(std::cos(phase), std::sin(phase));
  }
  StateVector out;
  out.site_count = spectrum_->site_count;
  out.mode_count = spectrum_->mode_count;
  out.amplitudes = matvec(spectrum_->vectors, rotated);
  return out;
}

double matter_probability(const StateVector& psi) {
  double p = 0.0;
  for (int n = 0; n < psi.site_count; ++n) p += std::norm(psi.amplitudes[n]);
  return p;
}

double rmsd(const StateVector& psi, const Realization& realization, double x0_nm) {
  const double pm = matter_probability(psi);
  if (pm < 1e-14) throw NoMatterContentError("rmsd: matter probability below 1e-14");
  double second_moment = 0.0;
  for (int n = 0; n < psi.site_count; ++n) {
    const double dx = realization.positions_nm[n] - x0_nm;
    second_moment += std::norm(psi.amplitudes[n]) * dx * dx;
  }
  return std::sqrt(second_moment / pm);
}

SiteInterval initial_interval(const WavepacketSpec& packet, const Realization& realization,
                              const CavityGeometry& geometry) {
  const double x0 = packet.center_or_default(geometry);
  const double lo = x0 - 3.0 * packet.sigma_x_nm;
  const double hi = x0 + 3.0 * packet.sigma_x_nm;
  const auto& x = realization.positions_nm;
  const auto first = std::lower_bound(x.begin(), x.end(), lo);
  const auto last = std::upper_bound(x.begin(), x.end(), hi);
  if (first == last) {
    throw DegenerateWavepacketError("no sites inside the +-3 sigma_x interval");
  }
  return {static_cast<std::size_t>(first - x.begin()),
          static_cast<std::size_t>(last - x.begin()) - 1};
}

double migration_probability(const StateVector& psi, const SiteInterval& interval) {
  const double pm = matter_probability(psi);
  if (pm < 1e-14) throw NoMatterContentError("migration_probability: matter probability below 1e-14");
  double inside = 0.0;
  for (std::size_t n = interval.first; n <= interval.last; ++n) {
    inside += std::norm(psi.amplitudes[n]);
  }
  return 1.0 - inside / pm;
}

double boundary_probability(const StateVector& psi, int n_edge) {
  if (n_edge < 0 || 2 * n_edge >= psi.site_count) {
    throw ConfigError("boundary_probability: n_edge must satisfy 0 <= n_edge < N_M/2");
  }
  double p = 0.0;
  for (int n = 0; n < n_edge; ++n) {
    p += std::norm(psi.amplitudes[n]);
    p += std::norm(psi.amplitudes[psi.site_count - 1 - n]);
  }
  return p;
}

DensityProfile density_profile(const StateVector& psi, const Realization& realization,
                               const CavityGeometry& geometry, double bin_width_nm) {
  if (!(bin_width_nm > 0.0)) throw ConfigError("bin_width_nm must be positive");
  const std::size_t n_bins = static_cast<std::size_t>(
      std::ceil(geometry.length_x_nm / bin_width_nm - 1e-12));
  DensityProfile profile;
  profile.center_nm.resize(n_bins);
  profile.probability.assign(n_bins, 0.0);
  for (std::size_t b = 0; b < n_bins; ++b) {
    profile.center_nm[b] = (static_cast<double>(b) + 0.5) * bin_width_nm;
  }
  for (int n = 0; n < psi.site_count; ++n) {
    auto b = static_cast<std::size_t>(realization.positions_nm[n] / bin_width_nm);
    b = std::min(b, n_bins - 1);
    profile.probability[b] += std::norm(psi.amplitudes[n]);
  }
  return profile;
}

std::vector<double> uniform_grid(double t_max_fs, double dt_fs) {
  if (t_max_fs < 0.0 || !(dt_fs > 0.0)) {
    throw ConfigError("time grid requires t_max_fs >= 0 and dt_fs > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor(t_max_fs / dt_fs + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = static_cast<double>(i) * dt_fs;
  return grid;
}

TimeSeries compute_observables(const SpectralPropagator& propagator,
                               const Realization& realization, std::span<const double> t_fs,
                               double x0_nm, const SiteInterval& interval, int n_edge) {
  TimeSeries series;
  series.t_fs.assign(t_fs.begin(), t_fs.end());
  series.matter_probability.reserve(t_fs.size());
  series.rmsd_nm.reserve(t_fs.size());
  series.chi.reserve(t_fs.size());
  series.boundary_probability.reserve(t_fs.size());
  for (double t : t_fs) {
    const StateVector psi = propagator.state_at(t);
    double norm_sq = 0.0;
    for (const auto& amp : psi.amplitudes) norm_sq += std::norm(amp);
    series.max_norm_deviation =
        std::max(series.max_norm_deviation, std::abs(std::sqrt(norm_sq) - 1.0));
    series.matter_probability.push_back(matter_probability(psi));
    series.rmsd_nm.push_back(rmsd(psi, realization, x0_nm));
    series.chi.push_back(migration_probability(psi, interval));
    series.boundary_probability.push_back(boundary_probability(psi, n_edge));
  }
  return series;
}

double energy_expectation(const HamiltonianMatrix& hamiltonian, const StateVector& psi) {
  if (psi.dim() != hamiltonian.dim()) {
    throw DimensionError("energy_expectation: dimension mismatch");
  }
  const auto hpsi = matvec(hamiltonian.matrix, psi.amplitudes);
  cplx value{0.0, 0.0};
  for (int i = 0; i < psi.dim(); ++i) value += std::conj(psi.amplitudes[i]) * hpsi[i];
  return value.real();
}

void write_timeseries_csv(const TimeSeries& series, std::ostream& out) {
  out << "t_fs,P_M,RMSD_nm,chi,P_boundary\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.t_fs[i] << ',' << series.matter_probability[i] << ',' << series.rmsd_nm[i]
        << ',' << series.chi[i] << ',' << series.boundary_probability[i] << '\n';
  }
}

void write_profile_csv(const DensityProfile& profile, std::ostream& out) {
  out << "bin_center_nm,probability\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < profile.center_nm.size(); ++i) {
    out << profile.center_nm[i] << ',' << profile.probability[i] << '\n';
  }
}

}  // namespace polwire

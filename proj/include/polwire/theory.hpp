#pragma once

#include <span>

#include "polwire/dynamics.hpp"

namespace polwire {

struct BallisticFit {
  double v0_nm_fs = 0.0;
  double intercept_nm = 0.0;
  double r_squared = 0.0;
  double window_tmin_fs = 0.0;
  double window_tmax_fs = 0.0;
  std::size_t sample_count = 0;
};

// Least-squares line through the (t, RMSD) samples inside [tmin, tmax].
// Throws InsufficientSamplesError below 5 points.
BallisticFit fit_ballistic_velocity(const TimeSeries& series, double tmin_fs, double tmax_fs);

// Ballistic velocity estimate from the ordered dispersion and the initial
// exciton momentum distribution:
//
//   v0^2 = sum_q P(q) [(veff_LP)^2 + (veff_UP)^2] / sum_q P(q) (Pi_LP^2 + Pi_UP^2)
//
// The denominator is the time-averaged matter content of the evolving packet;
// dividing by it keeps the estimate consistent with the matter-renormalized
// RMSD that the fits measure. P(q) may be unnormalized (the ratio is
// scale-invariant). Throws GridMismatchError if P(q) is not on the table's grid.
double predict_v0(const DispersionTable& table, std::span<const double> momentum_weights);

// Early-growth curvature G = (1/2) d^2/dt^2 of the escape probability
// 1 - sum_{n in I} P_n(t) at t -> 0+, without matter renormalization (P_M is
// approximately constant at early times). All three in 1/fs^2:
//   exact   - full eigenpair cross-term sum for this realization and packet
//   weak    - long-wavelength approximation, uniform packet weights 1/N_I
//   strong  - per-site |c_n|^2-weighted form; its disorder average over an
//             ensemble of realizations estimates the strong-disorder limit
struct EarlyGrowth {
  double exact = 0.0;
  double weak = 0.0;
  double strong = 0.0;
};

EarlyGrowth early_growth(const Spectrum& spectrum, const StateVector& psi0,
                         const SiteInterval& interval);

struct RabiEstimate {
  double period_fs = 0.0;
  double amplitude = 0.0;  // half peak-to-trough of the fitted component
};

// Dominant oscillation of P_M(t): discrete periodogram over periods >= 4 fs
// (linear detrend, at least 1.5 cycles in the window), parabolic peak
// refinement, then a cosine fit at the peak for the amplitude. Throws
// NoOscillationError unless the peak exceeds 3x the median band power.
RabiEstimate rabi_frequency_estimate(const TimeSeries& series);

struct GapEstimate {
  bool resolved = false;
  double gap_ev = 0.0;  // meaningful only when resolved
};

// Polariton gap from bright modes with |q_peak| <= q_window: energies split
// at E_M into LP/UP clusters, gap = mean(UP) - mean(LP). Reported unresolved
// when either cluster is empty or the clusters are not separated by a void
// of at least half the cluster-mean distance (the branches have merged).
GapEstimate polariton_gap(std::span<const BrightMode> bright_modes, double q_window_invnm,
                          double site_energy_ev);

// Time at which the series first reaches 95% of its final value.
double steady_state_time_fs(std::span<const double> t_fs, std::span<const double> values);

}  // namespace polwire

#include "polwire/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "polwire/constants.hpp"
#include "polwire/errors.hpp"

namespace polwire {

BallisticFit fit_ballistic_velocity(const TimeSeries& series, double tmin_fs, double tmax_fs) {
  std::vector<double> t, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.t_fs[i] >= tmin_fs - 1e-12 && series.t_fs[i] <= tmax_fs + 1e-12) {
      t.push_back(series.t_fs[i]);
      y.push_back(series.rmsd_nm[i]);
    }
  }
  if (t.size() < 5) {
    throw InsufficientSamplesError("fit_ballistic_velocity: fewer than 5 samples in window");
  }
  const double n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double tbar = st / n, ybar = sy / n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tbar) * (t[i] - tbar);
    sty += (t[i] - tbar) * (y[i] - ybar);
  }
  BallisticFit fit;
  fit.v0_nm_fs = sty / stt;
  fit.intercept_nm = ybar - fit.v0_nm_fs * tbar;
  fit.window_tmin_fs = tmin_fs;
  fit.window_tmax_fs = tmax_fs;
  fit.sample_count = t.size();
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (fit.intercept_nm + fit.v0_nm_fs * t[i]);
    ss_res += r * r;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double predict_v0(const DispersionTable& table, std::span<const double> momentum_weights) {
  if (momentum_weights.size() != table.size()) {
    throw GridMismatchError("predict_v0: momentum distribution not on the dispersion grid");
  }
  double total = 0.0, speed_sq = 0.0, matter = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double w = momentum_weights[i];
    total += w;
    speed_sq += w * (table.veff_lp[i] * table.veff_lp[i] + table.veff_up[i] * table.veff_up[i]);
    matter += w * (table.pi_lp[i] * table.pi_lp[i] + table.pi_up[i] * table.pi_up[i]);
  }
  if (!(total > 0.0)) throw GridMismatchError("predict_v0: momentum distribution is empty");
  return std::sqrt(speed_sq / matter);
}

EarlyGrowth early_growth(const Spectrum& spectrum, const StateVector& psi0,
                         const SiteInterval& interval) {
  if (psi0.dim() != spectrum.dim()) {
    throw DimensionError("early_growth: state dimension does not match spectrum");
  }
  const int dim = spectrum.dim();
  const auto overlaps = matvec(spectrum.vectors, psi0.amplitudes, /*adjoint=*/true);

  // Site-resolved spectral moments: s_k(n) = sum_A omega_A^k <n|A><A|psi0>,
  // w_k(n) = sum_A omega_A^k |<n|A>|^2. The pair sums over (A,B) with
  // (omega_A - omega_B)^2 weights collapse to w0 w2 - w1^2 combinations.
  EarlyGrowth g;
  const double n_interval = static_cast<double>(interval.count());
  for (std::size_t n = interval.first; n <= interval.last; ++n) {
    cplx s0{0.0, 0.0}, s1{0.0, 0.0}, s2{0.0, 0.0};
    double w0 = 0.0, w1 = 0.0, w2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double omega = spectrum.omega[a];
      const cplx u = spectrum.vectors(n, a) * overlaps[a];
      s0 += u;
      s1 += omega * u;
      s2 += omega * omega * u;
      const double p = std::norm(spectrum.vectors(n, a));
      w0 += p;
      w1 += omega * p;
      w2 += omega * omega * p;
    }
    g.exact += (std::conj(s0) * s2).real() - std::norm(s1);
    const double pair_sum = w0 * w2 - w1 * w1;
    g.weak += pair_sum / n_interval;
    g.strong += std::norm(psi0.amplitudes[n]) * pair_sum;
  }
  return g;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Detrended {
  std::vector<double> t, y;
};

Detrended detrend_linear(const TimeSeries& series) {
  Detrended d;
  d.t = series.t_fs;
  d.y = series.matter_probability;
  const double n = static_cast<double>(d.t.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    st += d.t[i];
    sy += d.y[i];
  }
  const double tbar = st / n, ybar = sy / n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    stt += (d.t[i] - tbar) * (d.t[i] - tbar);
    sty += (d.t[i] - tbar) * (d.y[i] - ybar);
  }
  const double slope = stt > 0.0 ? sty / stt : 0.0;
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    d.y[i] -= ybar + slope * (d.t[i] - tbar);
  }
  return d;
}

double band_power(const Detrended& d, double freq) {
  cplx z{0.0, 0.0};
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    const double phase = -kTwoPi * freq * d.t[i];
    z += d.y[i] * cplx(std::cos(phase), std::sin(phase));
  }
  return std::norm(z);
}

}  // namespace

RabiEstimate rabi_frequency_estimate(const TimeSeries& series) {
  if (series.size() < 16) {
    throw InsufficientSamplesError("rabi_frequency_estimate: series too short");
  }
  const double span = series.t_fs.back() - series.t_fs.front();
  const double f_min = 1.5 / span;    // need at least 1.5 cycles in the window
  const double f_max = 0.25;          // periods below 4 fs are out of scope
  if (f_min >= f_max) {
    throw InsufficientSamplesError("rabi_frequency_estimate: window too short");
  }
  const Detrended d = detrend_linear(series);

  const std::size_t n_freq = 4000;
  const double df = (f_max - f_min) / static_cast<double>(n_freq - 1);
  std::vector<double> power(n_freq);
  for (std::size_t k = 0; k < n_freq; ++k) {
    power[k] = band_power(d, f_min + df * static_cast<double>(k));
  }
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
  std::vector<double> sorted = power;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double background = sorted[sorted.size() / 2];
  if (!(background > 0.0) || power[peak] < 3.0 * background) {
    throw NoOscillationError("rabi_frequency_estimate: no spectral peak above 3x background");
  }
  // A red spectrum of slow aperiodic drift always has some band maximum, so
  // the peak must also modulate P_M appreciably: under strong disorder the
  // residual wander fits below ~0.3% while genuine Rabi beats sit at 10%+.
  constexpr double kMinAmplitude = 5e-3;

  double f_peak = f_min + df * static_cast<double>(peak);
  if (peak > 0 && peak + 1 < n_freq) {
    const double a = power[peak - 1], b = power[peak], c = power[peak + 1];
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) f_peak += 0.5 * (a - c) / denom * df;
  }

  // cosine least squares at the peak frequency
  double caa = 0.0, cbb = 0.0, cab = 0.0, ya = 0.0, yb = 0.0;
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    const double cs = std::cos(kTwoPi * f_peak * d.t[i]);
    const double sn = std::sin(kTwoPi * f_peak * d.t[i]);
    caa += cs * cs;
    cbb += sn * sn;
    cab += cs * sn;
    ya += d.y[i] * cs;
    yb += d.y[i] * sn;
  }
  const double det = caa * cbb - cab * cab;
  RabiEstimate estimate;
  estimate.period_fs = 1.0 / f_peak;
  if (det != 0.0) {
    const double a = (ya * cbb - yb * cab) / det;
    const double b = (yb * caa - ya * cab) / det;
    estimate.amplitude = std::sqrt(a * a + b * b);
  }
  if (estimate.amplitude < kMinAmplitude) {
    throw NoOscillationError("rabi_frequency_estimate: dominant component amplitude below 0.5%");
  }
  return estimate;
}

GapEstimate polariton_gap(std::span<const BrightMode> bright_modes, double q_window_invnm,
                          double site_energy_ev) {
  std::vector<double> lower, upper;
  for (const auto& mode : bright_modes) {
    if (std::abs(mode.q_peak_invnm) > q_window_invnm) continue;
    (mode.energy_ev < site_energy_ev ? lower : upper).push_back(mode.energy_ev);
  }
  GapEstimate estimate;
  if (lower.empty() || upper.empty()) return estimate;  // unresolved

  const double lower_mean =
      std::accumulate(lower.begin(), lower.end(), 0.0) / static_cast<double>(lower.size());
  const double upper_mean =
      std::accumulate(upper.begin(), upper.end(), 0.0) / static_cast<double>(upper.size());
  const double gap = upper_mean - lower_mean;
  const double void_width =
      *std::min_element(upper.begin(), upper.end()) - *std::max_element(lower.begin(), lower.end());
  // merged branches: the pooled energies fill the region between the cluster
  // means instead of leaving a gap around E_M
  if (void_width < 0.5 * gap) return estimate;
  estimate.resolved = true;
  estimate.gap_ev = gap;
  return estimate;
}

double steady_state_time_fs(std::span<const double> t_fs, std::span<const double> values) {
  if (t_fs.empty() || t_fs.size() != values.size()) {
    throw DimensionError("steady_state_time_fs: bad input sizes");
  }
  const double target = 0.95 * values.back();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values.back() >= 0.0 ? values[i] >= target : values[i] <= target) return t_fs[i];
  }
  return t_fs.back();
}

}  // namespace polwire

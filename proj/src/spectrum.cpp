#include "polwire/spectrum.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "polwire/constants.hpp"
#include "polwire/errors.hpp"

namespace polwire {

double Spectrum::energy_ev(std::size_t i) const { return omega[i] * kHbar; }

namespace {

// Residual ||H v - E v||_inf for one eigenpair, in eV.
double column_residual(const HamiltonianMatrix& h, const ComplexMatrix& vectors,
                       double energy, std::size_t col) {
  const auto hv = matvec(h.matrix, vectors.column(col));
  double worst = 0.0;
  for (std::size_t i = 0; i < hv.size(); ++i) {
    worst = std::max(worst, std::abs(hv[i] - energy * vectors(i, col)));
  }
  return worst;
}

}  // namespace

Spectrum diagonalize(const HamiltonianMatrix& hamiltonian) {
  const int dim = hamiltonian.dim();
  EighResult eig = eigh(hamiltonian.matrix);  // copy consumed by the solver

  Spectrum spec;
  spec.site_count = hamiltonian.site_count;
  spec.mode_count = hamiltonian.mode_count;
  spec.mode_q_invnm = hamiltonian.mode_q_invnm;
  spec.omega.resize(dim);
  for (int i = 0; i < dim; ++i) spec.omega[i] = eig.values[i] / kHbar;
  spec.vectors = std::move(eig.vectors);

  spec.exciton_content.resize(dim);
  for (int a = 0; a < dim; ++a) {
    double w = 0.0;
    for (int n = 0; n < spec.site_count; ++n) w += std::norm(spec.vectors(n, a));
    spec.exciton_content[a] = w;
  }

  constexpr double kResidualTol = 1e-8;  // eV
  const std::size_t stride = dim <= 512 ? 1 : dim / 16;
  for (std::size_t col = 0; col < static_cast<std::size_t>(dim); col += stride) {
    if (column_residual(hamiltonian, spec.vectors, eig.values[col], col) > kResidualTol) {
      throw ConvergenceError("diagonalize: eigenpair residual above 1e-8 eV at column " +
                             std::to_string(col));
    }
  }
  return spec;
}

namespace {

struct BranchPoint {
  double e_lp, e_up;    // eV
  double pi_lp, pi_up;
};

BranchPoint solve_block(double site_energy, double coupling_sq, double photon_energy_ev) {
  BranchPoint p;
  const double mean = 0.5 * (site_energy + photon_energy_ev);
  const double detune = photon_energy_ev - site_energy;
  const double gap = std::sqrt(detune * detune + 4.0 * coupling_sq);
  p.e_lp = mean - 0.5 * gap;
  p.e_up = mean + 0.5 * gap;
  if (coupling_sq > 0.0) {
    const double dl = p.e_lp - site_energy;
    const double du = p.e_up - site_energy;
    p.pi_lp = coupling_sq / (coupling_sq + dl * dl);
    p.pi_up = coupling_sq / (coupling_sq + du * du);
  } else {
    // decoupled limit: the lower branch is whichever bare curve lies lower
    p.pi_lp = site_energy <= photon_energy_ev ? 1.0 : 0.0;
    p.pi_up = 1.0 - p.pi_lp;
  }
  return p;
}

}  // namespace

DispersionTable ordered_dispersion(const CavityGeometry& geometry, const MatterSpec& matter) {
  geometry.validate();
  matter.validate();
  DispersionTable table;
  table.site_energy_ev = matter.site_energy_ev;
  table.rabi_splitting_ev = matter.rabi_splitting_ev;
  table.photon_prefactor_ev_nm = kHbarC / std::sqrt(geometry.epsilon);
  table.transverse_cutoff_invnm = geometry.transverse_cutoff_invnm();

  const auto modes = photon_wavevectors(geometry);
  table.q_invnm.reserve(modes.size());
  for (const auto& mode : modes) {
    const double hw = photon_energy(geometry, mode.q_invnm);
    const double g2 =
        0.25 * matter.rabi_splitting_ev * matter.rabi_splitting_ev * matter.site_energy_ev / hw;
    const auto p = solve_block(matter.site_energy_ev, g2, hw);
    table.q_invnm.push_back(mode.q_invnm);
    table.omega_lp.push_back(p.e_lp / kHbar);
    table.omega_up.push_back(p.e_up / kHbar);
    table.pi_lp.push_back(p.pi_lp);
    table.pi_up.push_back(p.pi_up);
  }
  effective_group_velocity(table);
  return table;
}

void effective_group_velocity(DispersionTable& table) {
  const std::size_t n = table.size();
  table.vg_lp.assign(n, 0.0);
  table.vg_up.assign(n, 0.0);
  table.veff_lp.assign(n, 0.0);
  table.veff_up.assign(n, 0.0);
  const double em = table.site_energy_ev;
  const double c = table.photon_prefactor_ev_nm;
  const double q0 = table.transverse_cutoff_invnm;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = table.q_invnm[i];
    const double hw = c * std::sqrt(q * q + q0 * q0);
    const double dhw = c * c * q / hw;  // d(hbar omega_q)/dq
    const double g2 = 0.25 * table.rabi_splitting_ev * table.rabi_splitting_ev * em / hw;
    const double detune = hw - em;
    const double gap = std::sqrt(detune * detune + 4.0 * g2);
    // d gap/dq; g_q^2 ~ 1/omega_q gives the -2 g^2/hw term
    const double dgap = gap > 0.0 ? (detune * dhw - 2.0 * g2 * dhw / hw) / gap : dhw;
    table.vg_lp[i] = 0.5 * (dhw - dgap) / kHbar;
    table.vg_up[i] = 0.5 * (dhw + dgap) / kHbar;
    table.veff_lp[i] = table.pi_lp[i] * table.vg_lp[i];
    table.veff_up[i] = table.pi_up[i] * table.vg_up[i];
  }
}

std::vector<BrightMode> bright_mode_table(const Spectrum& spectrum, double photon_threshold) {
  if (!(photon_threshold > 0.0 && photon_threshold < 1.0)) {
    throw ConfigError("bright_mode_table: threshold must lie in (0,1)");
  }
  std::vector<BrightMode> bright;
  const int dim = spectrum.dim();
  for (int a = 0; a < dim; ++a) {
    if (spectrum.photon_content(a) <= photon_threshold) continue;
    double best = -1.0;
    int best_mode = 0;
    for (int j = 0; j < spectrum.mode_count; ++j) {
      const double w = std::norm(spectrum.vectors(spectrum.site_count + j, a));
      if (w > best) {
        best = w;
        best_mode = j;
      }
    }
    bright.push_back({spectrum.energy_ev(a), spectrum.mode_q_invnm[best_mode]});
  }
  return bright;
}

void write_dispersion_csv(const DispersionTable& table, std::ostream& out) {
  out << "q_invnm,omega_LP_invfs,omega_UP_invfs,Pi_LP,Pi_UP,vg_LP_nmfs,vg_UP_nmfs,"
         "veff_LP_nmfs,veff_UP_nmfs\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.q_invnm[i] << ',' << table.omega_lp[i] << ',' << table.omega_up[i] << ','
        << table.pi_lp[i] << ',' << table.pi_up[i] << ',' << table.vg_lp[i] << ','
        << table.vg_up[i] << ',' << table.veff_lp[i] << ',' << table.veff_up[i] << '\n';
  }
}

}  // namespace polwire

#include "molspin/spinmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace molspin {

namespace {

void check_table(const InteractionTable& t) {
  const std::size_t n = t.n();
  if (t.hartree.size() != n * n || t.fock.size() != n * n || t.modes.occupancy.size() != n)
    throw std::invalid_argument("interaction table does not cover the mode set");
}

Eigen::VectorXd delta_e(const ModeSet& ms, const TrapGeometry& geom) {
  Eigen::VectorXd d(ms.size());
  const double step = geom.delta_omega * geom.omega / (2 * std::numbers::pi);
  for (std::size_t i = 0; i < ms.size(); ++i) d[i] = step * ms.modes[i].energy();
  return d;
}

}  // namespace

CouplingMatrix build_couplings(const InteractionTable& t, const DipoleMoments& dm, const TrapGeometry& geom) {
  check_table(t);
  const std::size_t n = t.n();
  const double u = geom.energy_unit_hz();
  const double md = dm.mu_down, mu = dm.mu_up, p = dm.mu_du * dm.mu_ud;
  CouplingMatrix cm;
  cm.modes = t.modes;
  cm.jz = Eigen::MatrixXd::Zero(n, n);
  cm.jperp = Eigen::MatrixXd::Zero(n, n);
  cm.hz_pair = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // V_ij^ij is the Fock pairing, V_ij^ji the Hartree one
      const double f = t.f(i, j) * u, hh = t.h(i, j) * u;
      cm.jperp(i, j) = 2 * (-md * mu * f + p * hh);
      cm.jz(i, j) = -(f - hh) * (md * md + mu * mu) - 2 * md * mu * hh + 2 * p * f;
      cm.hz_pair(i, j) = -0.5 * (f - hh) * (mu * mu - md * md);
    }
  }
  cm.hz = cm.hz_pair * Eigen::Map<const Eigen::VectorXd>(t.modes.occupancy.data(), static_cast<Eigen::Index>(n));
  cm.delta_e = delta_e(t.modes, geom);
  return cm;
}

CouplingMatrix build_couplings_eta_form(const InteractionTable& t, const DipoleMoments& dm,
                                        const TrapGeometry& geom) {
  check_table(t);
  const auto cs = coupling_scalars(dm);
  const std::size_t n = t.n();
  const double u = geom.energy_unit_hz();
  CouplingMatrix cm;
  cm.modes = t.modes;
  cm.jz = Eigen::MatrixXd::Zero(n, n);
  cm.jperp = Eigen::MatrixXd::Zero(n, n);
  cm.hz_pair = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double f = t.f(i, j) * u, hh = t.h(i, j) * u;
      cm.jz(i, j) = cs.eta * hh - (cs.nu - cs.zeta) * f;
      cm.jperp(i, j) = (cs.eta - cs.nu) * f + cs.zeta * hh;
      cm.hz_pair(i, j) = 0.5 * cs.eta * (hh - f);
    }
  }
  cm.hz = cm.hz_pair * Eigen::Map<const Eigen::VectorXd>(t.modes.occupancy.data(), static_cast<Eigen::Index>(n));
  cm.delta_e = delta_e(t.modes, geom);
  return cm;
}

CollectiveParams collective_reduce(const CouplingMatrix& cm) {
  CollectiveParams cp;
  cp.n = cm.n();
  if (cp.n == 0) throw std::invalid_argument("collective_reduce: empty coupling matrix");
  const double n2 = static_cast<double>(cp.n) * cp.n;
  cp.jbar_perp = cm.jperp.sum() / n2;
  cp.jbar_z = cm.jz.sum() / n2;
  cp.chi = (cm.jz - cm.jperp).sum() / n2;
  cp.hbar_z = cm.hz.mean();
  return cp;
}

double chi_from_table(const InteractionTable& t, const DipoleMoments& dm, const TrapGeometry& geom) {
  check_table(t);
  const auto cs = coupling_scalars(dm);
  double s = 0;
  for (std::size_t k = 0; k < t.fock.size(); ++k) s += t.fock[k] - t.hartree[k];
  const double n2 = static_cast<double>(t.n()) * t.n();
  return cs.mu_of_E * s / n2 * geom.energy_unit_hz();
}

InteractionTable subset(const InteractionTable& t, const std::vector<std::size_t>& idx) {
  InteractionTable s;
  s.c1 = t.c1;
  s.method = t.method;
  s.precision_bits = t.precision_bits;
  const std::size_t m = idx.size();
  s.hartree.resize(m * m);
  s.fock.resize(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    if (idx[a] >= t.n()) throw std::out_of_range("subset: mode index outside table");
    s.modes.modes.push_back(t.modes.modes[idx[a]]);
    s.modes.occupancy.push_back(t.modes.occupancy[idx[a]]);
    for (std::size_t b = 0; b < m; ++b) {
      s.hartree[a * m + b] = t.h(idx[a], idx[b]);
      s.fock[a * m + b] = t.f(idx[a], idx[b]);
    }
  }
  return s;
}

std::vector<double> lattice_couplings(int nx, int ny, double spacing) {
  if (nx < 1 || ny < 1 || nx * ny < 2) throw std::invalid_argument("lattice_couplings: need at least two sites");
  std::vector<double> v;
  const int n = nx * ny;
  v.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double dx = (a % nx - b % nx) * spacing, dy = (a / nx - b / nx) * spacing;
      v.push_back(std::pow(dx * dx + dy * dy, -1.5));
    }
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x /= mean;
  return v;
}

std::vector<double> trap_couplings(const InteractionTable& t) {
  std::vector<double> v;
  for (std::size_t i = 0; i < t.n(); ++i)
    for (std::size_t j = i + 1; j < t.n(); ++j) v.push_back(t.f(i, j) - t.h(i, j));
  return v;
}

double coefficient_of_variation(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("coefficient_of_variation: need two values");
  double m = 0, s = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1)) / std::abs(m);
}

std::vector<HistogramBin> coupling_histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("coupling_histogram: bins must be positive");
  std::vector<double> mag;
  for (double x : values)
    if (x != 0 && std::isfinite(x)) mag.push_back(std::abs(x));
  if (mag.empty()) throw std::invalid_argument("coupling_histogram: no nonzero finite values");
  double mean = 0;
  for (double x : mag) mean += x;
  mean /= static_cast<double>(mag.size());
  const auto [lo_it, hi_it] = std::minmax_element(mag.begin(), mag.end());
  const double lo = std::log10(*lo_it / mean), hi = std::log10(*hi_it / mean);
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  std::vector<HistogramBin> h(bins);
  for (int b = 0; b < bins; ++b) h[b].center = std::pow(10.0, lo + (b + 0.5) * width);
  for (double x : values) {
    if (x == 0 || !std::isfinite(x)) continue;
    int b = static_cast<int>((std::log10(std::abs(x) / mean) - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    (x > 0 ? h[b].positive : h[b].negative)++;
  }
  return h;
}

}  // namespace molspin

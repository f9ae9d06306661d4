#include "molspin/losses.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace molspin {

using std::numbers::pi;

namespace {

// h_n(x) = phi_n(x) e^{x^2/2}, normalized
Eigen::MatrixXd hermite_table(int nmax, const double* x, int npts) {
  Eigen::MatrixXd h(nmax + 1, npts);
  for (int k = 0; k < npts; ++k) {
    double p0 = std::pow(pi, -0.25), p1 = std::sqrt(2.0) * x[k] * p0;
    h(0, k) = p0;
    if (nmax >= 1) h(1, k) = p1;
    for (int n = 1; n < nmax; ++n) {
      const double p2 = std::sqrt(2.0 / (n + 1)) * x[k] * p1 - std::sqrt(static_cast<double>(n) / (n + 1)) * p0;
      p0 = p1;
      p1 = p2;
      h(n + 1, k) = p1;
    }
  }
  return h;
}

// O(a, b) for all a, b <= nmax: substitute x = y / sqrt 2 so the weight is e^{-y^2}; the
// integrand is then a polynomial of degree 2(a + b) <= 4 nmax, exact with 2 nmax + 1 nodes or more.
Eigen::MatrixXd overlap_matrix(int nmax) {
  const int npts = 2 * nmax + 2;
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, npts, 0.0, 1.0, 0.0, 0.0),
      &gsl_integration_fixed_free);
  const double* y = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  std::vector<double> x(npts);
  for (int k = 0; k < npts; ++k) x[k] = y[k] / std::sqrt(2.0);
  const Eigen::MatrixXd h = hermite_table(nmax, x.data(), npts);
  const Eigen::MatrixXd h2 = h.cwiseAbs2();
  const Eigen::Map<const Eigen::VectorXd> wv(w, npts);
  return h2 * wv.asDiagonal() * h2.transpose() / std::sqrt(2.0);
}

}  // namespace

double overlap_1d(int a, int b) {
  if (a < 0 || b < 0) throw std::invalid_argument("overlap_1d: negative index");
  return overlap_matrix(std::max(a, b))(a, b);
}

LossTable build_loss_table(const ModeSet& ms, const TrapGeometry& geom, double a_sc) {
  int top = 0;
  for (const auto& m : ms.modes) top = std::max({top, m.nx, m.ny});
  const Eigen::MatrixXd o = overlap_matrix(top);
  const double ap = geom.a_perp(), az = geom.a_z();
  // 4 pi hbar a / M times the Z ground-state overlap 1/(a_z sqrt(2 pi)) and 1/a_perp^2 in-plane
  const double pre = 4 * pi * si::hbar * a_sc / geom.mass / (az * std::sqrt(2 * pi)) / (ap * ap);
  const auto n = static_cast<Eigen::Index>(ms.size());
  LossTable lt;
  lt.a_sc = a_sc;
  lt.gamma.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto &a = ms.modes[i], &b = ms.modes[j];
      lt.gamma(i, j) = pre * o(a.nx, b.nx) * o(a.ny, b.ny);
    }
  return lt;
}

LossState loss_rhs(const CouplingMatrix& cm, const LossTable& lt, const LossState& s) {
  const Eigen::VectorXd bx = cm.jperp * s.sx, by = cm.jperp * s.sy;
  const Eigen::VectorXd bz = cm.jz * s.sz + cm.hz_pair * s.rho + cm.delta_e;
  const Eigen::VectorXd gx = lt.gamma * s.sx, gy = lt.gamma * s.sy, gz = lt.gamma * s.sz, gr = lt.gamma * s.rho;
  const double w = 2 * pi;
  LossState d;
  d.sx = w * (by.cwiseProduct(s.sz) - bz.cwiseProduct(s.sy)) + 0.5 * (s.rho.cwiseProduct(gx) - s.sx.cwiseProduct(gr));
  d.sy = w * (bz.cwiseProduct(s.sx) - bx.cwiseProduct(s.sz)) + 0.5 * (s.rho.cwiseProduct(gy) - s.sy.cwiseProduct(gr));
  d.sz = w * (bx.cwiseProduct(s.sy) - by.cwiseProduct(s.sx)) + 0.5 * (s.rho.cwiseProduct(gz) - s.sz.cwiseProduct(gr));
  d.rho = 0.5 * (4 * (s.sx.cwiseProduct(gx) + s.sy.cwiseProduct(gy) + s.sz.cwiseProduct(gz)) - s.rho.cwiseProduct(gr));
  return d;
}

ObservableSeries evolve_with_losses(const CouplingMatrix& cm, const LossTable& lt, const LossConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(cm.n());
  if (lt.gamma.rows() != n) throw std::invalid_argument("evolve_with_losses: loss table does not match couplings");
  if (!(cfg.t_max >= 0)) throw std::invalid_argument("evolve_with_losses: negative duration");
  double base = cfg.dt;
  if (!(base > 0)) {
    base = stable_dt(cm);
    const double gmax = n ? lt.gamma.rowwise().sum().maxCoeff() : 0.0;
    if (gmax > 0) base = std::min(base, 0.05 / gmax);
  }
  const double rec = cfg.record_dt > 0 ? cfg.record_dt : base;
  const auto nrec = static_cast<long>(std::llround(cfg.t_max / rec));
  const auto per = static_cast<long>(std::ceil(rec / base - 1e-9));
  const double dt = rec / static_cast<double>(per);

  LossState s;
  s.rho = Eigen::Map<const Eigen::VectorXd>(cm.modes.occupancy.data(), n);
  s.sx = 0.5 * cfg.direction.x() * s.rho;
  s.sy = 0.5 * cfg.direction.y() * s.rho;
  s.sz = 0.5 * cfg.direction.z() * s.rho;

  ObservableSeries out;
  auto record = [&](double t) {
    out.times.push_back(t);
    SpinMoments m;
    m.mean = {s.sx.sum(), s.sy.sum(), s.sz.sum()};
    m.n = s.rho.sum();
    out.moments.push_back(m);
    out.ntotal.push_back(m.n);
  };
  auto axpy = [](const LossState& a, double h, const LossState& d) {
    return LossState{a.sx + h * d.sx, a.sy + h * d.sy, a.sz + h * d.sz, a.rho + h * d.rho};
  };
  record(0);
  for (long r = 1; r <= nrec; ++r) {
    for (long k = 0; k < per; ++k) {
      const LossState k1 = loss_rhs(cm, lt, s);
      const LossState k2 = loss_rhs(cm, lt, axpy(s, 0.5 * dt, k1));
      const LossState k3 = loss_rhs(cm, lt, axpy(s, 0.5 * dt, k2));
      const LossState k4 = loss_rhs(cm, lt, axpy(s, dt, k3));
      s.sx += dt / 6 * (k1.sx + 2 * k2.sx + 2 * k3.sx + k4.sx);
      s.sy += dt / 6 * (k1.sy + 2 * k2.sy + 2 * k3.sy + k4.sy);
      s.sz += dt / 6 * (k1.sz + 2 * k2.sz + 2 * k3.sz + k4.sz);
      s.rho += dt / 6 * (k1.rho + 2 * k2.rho + 2 * k3.rho + k4.rho);
    }
    if (n && (s.rho.minCoeff() < -cfg.rho_tol || s.rho.maxCoeff() > 1 + cfg.rho_tol))
      throw std::runtime_error("evolve_with_losses: mode density left [0, 1]");
    record(r * rec);
  }
  finish_series(out);
  return out;
}

}  // namespace molspin

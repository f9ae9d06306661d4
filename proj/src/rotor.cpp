#include "molspin/rotor.hpp"

#include "molspin/units.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace molspin {

namespace {

double lfact(int n) { return std::lgamma(n + 1.0); }

}  // namespace

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  // Racah formula
  const double tri = lfact(j1 + j2 - j3) + lfact(j1 - j2 + j3) + lfact(-j1 + j2 + j3) - lfact(j1 + j2 + j3 + 1);
  const double pre = 0.5 * (tri + lfact(j1 + m1) + lfact(j1 - m1) + lfact(j2 + m2) + lfact(j2 - m2) +
                            lfact(j3 + m3) + lfact(j3 - m3));
  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double t = lfact(k) + lfact(j1 + j2 - j3 - k) + lfact(j1 - m1 - k) + lfact(j2 + m2 - k) +
                     lfact(j3 - j2 + m1 + k) + lfact(j3 - j1 - m2 + k);
    sum += ((k % 2) ? -1.0 : 1.0) * std::exp(pre - t);
  }
  return ((j1 - j2 - m3) % 2 ? -1.0 : 1.0) * sum;
}

double rotor_dipole_element(int n1, int m1, int q, int n2, int m2) {
  const double ph = (std::abs(m1) % 2) ? -1.0 : 1.0;
  return ph * std::sqrt((2.0 * n1 + 1) * (2.0 * n2 + 1)) * wigner3j(n1, 1, n2, -m1, q, m2) *
         wigner3j(n1, 1, n2, 0, 0, 0);
}

StarkSolution stark_solve(const RotorParams& p) {
  if (p.field < 0) throw std::domain_error("stark_solve: negative field");
  if (p.n_max < 3) throw std::invalid_argument("stark_solve: n_max must be >= 3");
  StarkSolution sol;
  sol.field = p.field;
  sol.n_max = p.n_max;
  for (int m = 0; m <= p.n_max; ++m) {
    const int dim = p.n_max - m + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a) {
      const int n = m + a;
      h(a, a) = n * (n + 1.0);
      if (a + 1 < dim) {
        const double c = std::sqrt(((n + 1.0) * (n + 1.0) - m * m) / ((2.0 * n + 1) * (2.0 * n + 3)));
        h(a, a + 1) = h(a + 1, a) = -p.field * c;
      }
    }
    // irreducible tridiagonal blocks have simple spectra, so energy order is an adiabatic label
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::MatrixXd v = es.eigenvectors();
    // fix the sign so the zero-field component is positive
    for (int c = 0; c < dim; ++c) {
      int big = 0;
      v.col(c).cwiseAbs().maxCoeff(&big);
      if (v(c, c) < 0 || (std::abs(v(c, c)) < 1e-300 && v(big, c) < 0)) v.col(c) *= -1.0;
    }
    sol.values.push_back(es.eigenvalues());
    sol.vectors.push_back(v);
  }
  return sol;
}

double StarkSolution::energy(RotorState s) const {
  const int m = std::abs(s.nz);
  if (s.n < m || s.n > n_max) throw std::out_of_range("StarkSolution: state not in basis");
  return values[m](s.n - m);
}

Eigen::VectorXd StarkSolution::state(RotorState s) const {
  const int m = std::abs(s.nz);
  if (s.n < m || s.n > n_max) throw std::out_of_range("StarkSolution: state not in basis");
  return vectors[m].col(s.n - m);
}

namespace {

// <a| C^1_q |b> between dressed states
double dressed_element(const StarkSolution& sol, RotorState a, int q, RotorState b) {
  const Eigen::VectorXd va = sol.state(a), vb = sol.state(b);
  const int ma = a.nz, mb = b.nz;
  if (ma != mb + q) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < va.size(); ++i)
    for (int j = 0; j < vb.size(); ++j) {
      const int na = std::abs(ma) + i, nb = std::abs(mb) + j;
      if (std::abs(na - nb) != 1) continue;
      acc += va(i) * vb(j) * rotor_dipole_element(na, ma, q, nb, mb);
    }
  return acc;
}

}  // namespace

DipoleMoments dipole_moments(const StarkSolution& sol, Basis basis) {
  const RotorState down{0, 0};
  const RotorState up = basis == Basis::I ? RotorState{1, 1} : RotorState{1, 0};
  DipoleMoments dm;
  dm.basis = basis;
  dm.mu_down = dressed_element(sol, down, 0, down);
  dm.mu_up = dressed_element(sol, up, 0, up);
  if (basis == Basis::II) {
    dm.mu_du = dressed_element(sol, down, 0, up);
    dm.mu_ud = dm.mu_du;
  } else {
    dm.mu_du = dressed_element(sol, down, -1, up) / std::sqrt(2.0);
    dm.mu_ud = dressed_element(sol, up, +1, down) / std::sqrt(2.0);
  }
  return dm;
}

CouplingScalars coupling_scalars(const DipoleMoments& dm) {
  CouplingScalars cs;
  cs.eta = (dm.mu_down - dm.mu_up) * (dm.mu_down - dm.mu_up);
  cs.nu = (dm.mu_down + dm.mu_up) * (dm.mu_down + dm.mu_up);
  cs.zeta = 2 * dm.mu_du * dm.mu_ud;
  cs.mu_of_E = -cs.eta + cs.zeta;
  return cs;
}

double transition_slope(double field, RotorState a, RotorState b, int n_max, double step) {
  if (field < 0) throw std::domain_error("transition_slope: negative field");
  // the spectrum is even in the field, which makes the difference at E = 0 exact
  auto gap = [&](double e) {
    const auto s = stark_solve({std::abs(e), n_max});
    return s.energy(a) - s.energy(b);
  };
  return (gap(field + step) - gap(field - step)) / (2 * step);
}

double transition_slope_hz_per_v_cm(double field_v_per_cm, RotorState a, RotorState b, int n_max) {
  const double e = field_v_per_cm / krb::field_unit_v_per_cm;
  return transition_slope(e, a, b, n_max) * krb::rot_const_hz / krb::field_unit_v_per_cm;
}

double truncation_error(double field, int n_max) {
  const auto s1 = stark_solve({field, n_max});
  const auto s2 = stark_solve({field, 2 * n_max});
  double err = 0.0;
  for (RotorState s : {RotorState{0, 0}, RotorState{1, 0}, RotorState{1, 1}, RotorState{2, 0}, RotorState{2, 1},
                       RotorState{2, 2}})
    err = std::max(err, std::abs(s1.energy(s) - s2.energy(s)));
  return err;
}

}  // namespace molspin

#include <doctest.h>

#include "molspin/rotor.hpp"
#include "molspin/units.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace molspin;

namespace {

// Independent M = 0 Stark block: <N+1|cos|N> = (N+1)/sqrt((2N+1)(2N+3)), no 3j symbols.
double ground_energy_direct(double field, int n_max) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n) h(n, n) = n * (n + 1.0);
  for (int n = 0; n < n_max; ++n) h(n, n + 1) = h(n + 1, n) = -field * (n + 1) / std::sqrt((2 * n + 1.0) * (2 * n + 3));
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues()(0);
}

}  // namespace

TEST_CASE("zero-field spectrum") {
  const auto s = stark_solve({0.0, 10});
  CHECK(s.energy({0, 0}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(s.energy({1, 0}) == doctest::Approx(2.0));
  CHECK(s.energy({1, 1}) == doctest::Approx(2.0));
  CHECK(s.energy({2, -1}) == doctest::Approx(6.0));
}

TEST_CASE("weak field follows second-order perturbation theory") {
  const double e = 0.1;
  CHECK(std::abs(stark_solve({e, 10}).energy({0, 0}) + e * e / 6) < 1e-5);
  const auto d = dipole_moments(stark_solve({e, 10}), Basis::II);
  CHECK(std::abs(d.mu_down - e / 3) < 1e-3);
}

TEST_CASE("ground state matches an independent tridiagonal build") {
  for (double e : {0.5, 3.0, 10.0})
    CHECK(stark_solve({e, 12}).energy({0, 0}) == doctest::Approx(ground_energy_direct(e, 12)).epsilon(1e-12));
}

TEST_CASE("truncation is converged at n_max = 10") {
  const auto a = stark_solve({5.0, 10}), b = stark_solve({5.0, 14});
  for (RotorState s : {RotorState{0, 0}, RotorState{1, 0}, RotorState{1, 1}})
    CHECK(std::abs(a.energy(s) - b.energy(s)) < 1e-12);
  CHECK(truncation_error(10.0, 10) < 1e-10);
}

TEST_CASE("3j symbols") {
  CHECK(wigner3j(1, 1, 0, 0, 0, 0) == doctest::Approx(-1 / std::sqrt(3.0)));
  CHECK(wigner3j(1, 1, 2, 0, 0, 0) == doctest::Approx(std::sqrt(2.0 / 15)));
  CHECK(wigner3j(1, 1, 1, 0, 0, 0) == 0.0);
  CHECK(rotor_dipole_element(1, 0, 0, 0, 0) == doctest::Approx(1 / std::sqrt(3.0)));
}

TEST_CASE("dipole moments") {
  const auto d0 = dipole_moments(stark_solve({0.0, 10}), Basis::II);
  CHECK(std::abs(d0.mu_down) < 1e-14);
  CHECK(std::abs(d0.mu_up) < 1e-14);
  CHECK(std::abs(d0.mu_ud) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-12));

  double prev = -1;
  for (int k = 0; k <= 20; ++k) {
    const double mu = dipole_moments(stark_solve({0.5 * k, 10}), Basis::II).mu_down;
    CHECK(mu > prev);
    prev = mu;
  }
}

TEST_CASE("coupling scalars") {
  const auto c2 = coupling_scalars(dipole_moments(stark_solve({0.0, 10}), Basis::II));
  const auto c1 = coupling_scalars(dipole_moments(stark_solve({0.0, 10}), Basis::I));
  CHECK(c2.mu_of_E == doctest::Approx(2.0 / 3));
  CHECK(c1.mu_of_E == doctest::Approx(-0.5 * c2.mu_of_E).epsilon(1e-12));

  DipoleMoments same{0.4, 0.4, 0.0, 0.0, Basis::II};
  const auto c = coupling_scalars(same);
  CHECK(c.eta == 0.0);
  CHECK(c.zeta == 0.0);
  CHECK(c.mu_of_E == 0.0);
  CHECK(c.nu != 0.0);
}

TEST_CASE("transition slope") {
  CHECK(std::abs(transition_slope(0.0, {0, 0}, {1, 0})) < 1e-6);
  // at 1 kV/cm the levels are still close to quadratic: slope ~ E * d(curvature)
  const double s = transition_slope_hz_per_v_cm(1000.0, {0, 0}, {1, 0});
  CHECK(s < 0);
  const double e = 1000.0 / krb::field_unit_v_per_cm;
  // second order: E_00 = -E^2/6, E_10 = 2 + E^2/10, so d(E_00 - E_10)/dE = -E (1/3 + 1/5)
  const double approx = -e * (1.0 / 3 + 1.0 / 5) * krb::rot_const_hz / krb::field_unit_v_per_cm;
  CHECK(s == doctest::Approx(approx).epsilon(0.02));
}

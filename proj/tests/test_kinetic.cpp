#include <doctest.h>

#include "molspin/kinetic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gsl/gsl_sf_dilog.h>

#include <cmath>
#include <numbers>

using namespace molspin;
using std::numbers::pi;

TEST_CASE("scattering lengths") {
  const TrapGeometry g;
  const double add = dipole_length(g);
  CHECK(add == doctest::Approx(1.0124698712876854e-07).epsilon(1e-12));
  CHECK(dipole_length(g, 2 / std::sqrt(3.0)) == doctest::Approx(4 * add).epsilon(1e-14));
  const double a3 = a3d_from_dipole_length(add);
  CHECK(a3 == doctest::Approx(std::sqrt(32 * pi * add * add / 15 / (4 * pi))).epsilon(1e-14));
  const double a2 = a2d_from_geometry(g, a3);
  CHECK(a2 == doctest::Approx(4.0344250620469316e-08).epsilon(1e-12));
  // weak scattering pushes a_2d toward zero, strong scattering saturates at a_z sqrt(pi / B)
  CHECK(a2d_from_geometry(g, 1e-3 * a3) < 1e-20);
  CHECK(a2d_from_geometry(g, 1e6 * a3) == doctest::Approx(g.a_z() * std::sqrt(pi / 0.905)).epsilon(1e-5));
  CHECK(bound_state_energy(g, a2) == doctest::Approx(977.93539236701326).epsilon(1e-10));
}

TEST_CASE("semiclassical Fermi gas") {
  const double n = 1000, tf = std::sqrt(2 * n);
  for (double tt : {0.3, 1.0, 2.0}) {
    const double t = tt * tf;
    const double mu = semiclassical_mu(n, t);
    CHECK(-t * t * gsl_sf_dilog(-std::exp(mu / t)) == doctest::Approx(n).epsilon(1e-10));
    // the denominator collapses to N T
    CHECK(relaxation_denominator(1 / t, mu) == doctest::Approx(n * t).epsilon(1e-10));
  }
  CHECK(semiclassical_mu(n, tf) == doctest::Approx(-25.585391757939362).epsilon(1e-10));
}

TEST_CASE("relaxation denominator against direct phase-space quadrature") {
  // \int d^2p d^2r / (2 pi)^2 p_x^2 f (1 - f), with f = 1 / (exp(beta (p^2 + r^2)/2 - beta mu) + 1)
  const double beta = 0.05, mu = -10.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inner_max = 40 / std::sqrt(beta);
  auto outer = [&](double p) {
    auto inner = [&](double r) {
      const double x = std::exp(beta * ((p * p + r * r) / 2 - mu));
      const double f = 1 / (x + 1);
      return r * f * (1 - f);
    };
    // 2 pi r dr * 2 pi p dp / (2 pi)^2, and <p_x^2> = p^2 / 2 over the angle
    return p * p * p / 2 * GK::integrate(inner, 0.0, inner_max, 12, 1e-13);
  };
  const double direct = GK::integrate(outer, 0.0, inner_max, 12, 1e-12);
  CHECK(relaxation_denominator(beta, mu) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("Monte Carlo relaxation rate") {
  KineticParams kp;
  const auto a = relaxation_rate(kp, 1 << 14, 0, Exec::Parallel, 1.0);
  const auto b = relaxation_rate(kp, 1 << 16, 0, Exec::Parallel, 1.0);
  CHECK(b.tau == doctest::Approx(a.tau).epsilon(4 * a.rel_error));
  // standard error falls as 1/sqrt(samples)
  CHECK(b.rel_error / a.rel_error == doctest::Approx(0.5).epsilon(0.2));
  CHECK(b.samples == 1 << 16);
  CHECK(b.gamma * b.tau == doctest::Approx(1.0));

  const auto s = relaxation_rate(kp, 1 << 14, 0, Exec::Serial, 1.0);
  CHECK(s.tau == a.tau);
  CHECK(relaxation_rate(kp, 1 << 14, 1, Exec::Serial, 1.0).tau != a.tau);

  // degeneracy blocks collisions: the colder gas relaxes more slowly
  KineticParams cold = kp;
  cold.t_over_tf = 0.3;
  CHECK(relaxation_rate(cold, 1 << 16, 0, Exec::Parallel, 1.0).tau > b.tau);

  CHECK_THROWS_AS(relaxation_rate(kp, 4096, 0, Exec::Parallel, 1e-6), std::runtime_error);
  CHECK_THROWS(relaxation_rate(kp, 64));
}

TEST_CASE("shell model") {
  KineticParams kp;
  const auto k = shell_grid(kp);
  CHECK(k.energy.size() == kp.shells);
  CHECK(k.weight.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((k.weight.array() >= 0).all());
  CHECK(k.vz.cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("no dephasing, no decay") {
    const auto s = evolve_kinetic(kp, k, {});
    CHECK(s.sbar_norm.front() == 1.0);
    CHECK(s.sbar_norm.back() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::isnan(decay_time(s)));
  }
  SUBCASE("trap dephasing alone") {
    KineticParams d = kp;
    d.geom.delta_omega = 0.05;
    const auto s = evolve_kinetic(d, shell_grid(d), {});
    CHECK(decay_time(s) == doctest::Approx(0.0017783456423458108).epsilon(1e-6));
    CHECK(s.shell_sx.rows() == kp.shells);
    CHECK(s.shell_sx.cols() == static_cast<Eigen::Index>(s.times.size()));
    // finer shells barely move the answer
    d.shells = 64;
    CHECK(decay_time(evolve_kinetic(d, shell_grid(d), {})) == doctest::Approx(0.0017783456423458108).epsilon(0.01));
  }
}

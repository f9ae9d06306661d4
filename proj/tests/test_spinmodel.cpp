#include <doctest.h>

#include "molspin/spinmodel.hpp"
#include "molspin/thermal.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numeric>
#include <set>

using namespace molspin;

namespace {

const TrapGeometry geo{};

DipoleMoments dm(double field, Basis b) { return dipole_moments(stark_solve({field, 10}), b); }

}  // namespace

TEST_CASE("geometry") {
  CHECK(geo.c1() == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(geo.energy_unit_hz() == doctest::Approx(302.5356).epsilon(1e-5));
  TrapGeometry bad;
  bad.omega_z = bad.omega;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("coupling matrices") {
  const auto t = build_interaction_table(ModeSet::shell_fill(28), geo.c1());
  SUBCASE("zero field, basis II: no permanent dipoles, pure exchange") {
    const auto c = build_couplings(t, dm(0, Basis::II), geo);
    const double u = geo.energy_unit_hz();
    for (std::size_t i = 0; i < c.n(); ++i)
      for (std::size_t j = 0; j < c.n(); ++j) {
        if (i == j) continue;
        CHECK(c.jperp(i, j) == doctest::Approx(2.0 / 3 * t.h(i, j) * u).epsilon(1e-12));
        CHECK(c.jz(i, j) == doctest::Approx(2.0 / 3 * t.f(i, j) * u).epsilon(1e-12));
      }
    CHECK(c.hz.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("symmetric with empty diagonal") {
    const auto c = build_couplings(t, dm(3.0, Basis::I), geo);
    CHECK((c.jz - c.jz.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c.jperp - c.jperp.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.jz.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("chi depends only on the Fock-Hartree difference") {
    for (double e : {0.0, 2.0, 6.0})
      for (Basis b : {Basis::I, Basis::II}) {
        const auto c = collective_reduce(build_couplings(t, dm(e, b), geo));
        CHECK(c.chi == doctest::Approx(chi_from_table(t, dm(e, b), geo)).epsilon(1e-10));
        CHECK(collective_reduce(build_couplings_eta_form(t, dm(e, b), geo)).chi == doctest::Approx(c.chi).epsilon(1e-10));
      }
  }
  SUBCASE("basis I twists at -1/2 the rate of basis II at zero field") {
    const double c2 = collective_reduce(build_couplings(t, dm(0, Basis::II), geo)).oat_rate();
    const double c1 = collective_reduce(build_couplings(t, dm(0, Basis::I), geo)).oat_rate();
    CHECK(c2 / c1 == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("trap dephasing") {
    TrapGeometry g = geo;
    g.delta_omega = 0.1;
    const auto c = build_couplings(t, dm(0, Basis::II), g);
    CHECK(c.delta_e[0] == 0.0);
    CHECK(c.delta_e[1] == doctest::Approx(0.1 * g.omega / (2 * std::numbers::pi)));
  }
}

TEST_CASE("subset keeps elements") {
  const auto t = build_interaction_table(ModeSet::shell_fill(15), geo.c1());
  const auto s = subset(t, {2, 7, 11});
  REQUIRE(s.n() == 3);
  CHECK(s.h(0, 2) == t.h(2, 11));
  CHECK(s.f(1, 0) == t.f(7, 2));
  CHECK(s.modes.modes[1] == t.modes.modes[7]);
}

TEST_CASE("coupling statistics") {
  const auto lat = lattice_couplings(20, 10);
  CHECK(lat.size() == 200 * 199 / 2);
  CHECK(std::accumulate(lat.begin(), lat.end(), 0.0) / lat.size() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coefficient_of_variation({1, 1, 1, 1}) == 0.0);
  CHECK(coefficient_of_variation({1, 3}) == doctest::Approx(std::sqrt(0.5)));  // sample deviation

  const auto trap = trap_couplings(build_interaction_table(ModeSet::shell_fill(200), geo.c1()));
  CHECK(trap.size() == 200 * 199 / 2);
  // all-to-all-like: the trap spread is an order of magnitude below the lattice one
  CHECK(coefficient_of_variation(lat) / coefficient_of_variation(trap) > 10);

  const auto h = coupling_histogram(lat, 30);
  CHECK(h.size() == 30);
  std::size_t total = 0;
  for (const auto& b : h) total += b.positive + b.negative;
  CHECK(total == lat.size());
}

TEST_CASE("thermal occupation") {
  SUBCASE("zero temperature fills the Fermi sea deterministically") {
    const auto pool = ModeSet::pool(thermal_pool_emax(21, 0));
    const auto th = solve_thermal(21, 0, pool);
    const auto a = sample_modes(th, pool, 1), b = sample_modes(th, pool, 99, 4);
    CHECK(a == b);
    REQUIRE(a.size() == 21);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == k);
  }
  SUBCASE("chemical potential against an independent root") {
    const double n = 300, tt = 0.5;
    const auto pool = ModeSet::pool(thermal_pool_emax(n, tt));
    const auto th = solve_thermal(n, tt, pool);
    int emax = 0;
    for (const auto& m : pool.modes) emax = std::max(emax, m.energy());
    const double t = tt * std::sqrt(2 * n);
    auto f = [&](double mu) {
      double s = 0;
      for (int e = 0; e <= emax; ++e) s += (e + 1) / (std::exp((e - mu) / t) + 1);
      return s - n;
    };
    boost::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(f, -50.0, double(emax), boost::math::tools::eps_tolerance<double>(50), it);
    CHECK(th.mu_chem == doctest::Approx(0.5 * (r.first + r.second)).epsilon(1e-12));
    const auto occ = thermal_occupancy(th, pool);
    CHECK(std::accumulate(occ.occupancy.begin(), occ.occupancy.end(), 0.0) == doctest::Approx(n).epsilon(1e-10));
  }
  SUBCASE("sampled configurations") {
    const double n = 100, tt = 0.5;
    const auto pool = ModeSet::pool(thermal_pool_emax(n, tt));
    const auto th = solve_thermal(n, tt, pool);
    // variance of the grand-canonical number is sum f (1 - f)
    double var = 0;
    for (const auto& m : pool.modes) {
      const double p = fermi_occupation(th, m.energy());
      var += p * (1 - p);
    }
    const int k = 40;
    double mean = 0;
    for (int s = 0; s < k; ++s) {
      const auto idx = sample_modes(th, pool, 11, s);
      CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == idx.size());
      mean += static_cast<double>(idx.size()) / k;
    }
    CHECK(std::abs(mean - n) < 3 * std::sqrt(var / k));
    CHECK(sample_modes(th, pool, 11, 3) == sample_modes(th, pool, 11, 3));
    CHECK(sample_modes(th, pool, 11, 3) != sample_modes(th, pool, 11, 4));
  }
  CHECK_THROWS(solve_thermal(50, 0.5, ModeSet::pool(3)));
}

#include <doctest.h>

#include "molspin/semiclassical.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>

using namespace molspin;
using std::numbers::pi;

namespace {

// Complete elliptic integrals straight from their defining integrals, parameter m.
double elliptic(double m, bool second) {
  struct P {
    double m;
    bool second;
  } p{m, second};
  gsl_function f;
  f.params = &p;
  f.function = [](double t, void* v) {
    const auto& q = *static_cast<P*>(v);
    const double s = std::sqrt(1 - q.m * std::sin(t) * std::sin(t));
    return q.second ? s : 1 / s;
  };
  gsl_set_error_handler_off();
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(200);
  double r = 0, err = 0;
  gsl_integration_qag(&f, 0, pi / 2, 0, 1e-13, 200, GSL_INTEG_GAUSS61, ws, &r, &err);
  gsl_integration_workspace_free(ws);
  return r;
}

double g_quadrature(double b) {
  const double m = b * b;
  return (16 * (m * m - m + 1) * elliptic(m, true) - 8 * (m * m - 3 * m + 2) * elliptic(m, false)) / (15 * pi * m);
}

}  // namespace

TEST_CASE("g(b)") {
  CHECK(g_function(1.0) == doctest::Approx(16 / (15 * pi)).epsilon(1e-15));
  CHECK(g_function(0.5) == doctest::Approx(0.11685198328155982).epsilon(1e-14));
  for (double b : {0.5, 0.8, 0.95, 0.999})
    CHECK(g_function(b) == doctest::Approx(g_quadrature(b)).epsilon(1e-12));
  // the series branch: the direct formula cancels to about m^2 here, so compare loosely
  CHECK(g_function(0.3) == doctest::Approx(g_quadrature(0.3)).epsilon(1e-9));
  // continuity across the series/elliptic switch at m = 0.2
  const double bs = std::sqrt(0.2);
  CHECK(g_function(bs * (1 - 1e-9)) == doctest::Approx(g_function(bs * (1 + 1e-9))).epsilon(1e-8));
  // leading small-b behaviour g ~ b^2 / 2
  CHECK(g_function(1e-3) / 1e-6 == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS(g_function(0.0));
  CHECK_THROWS(g_function(1.5));
}

TEST_CASE("anisotropy factor") {
  CHECK(anisotropy_g_big(0.3, 0.6) == doctest::Approx(2.4424651315557164).epsilon(1e-13));
  CHECK(anisotropy_g_big(0.3, 0.6) == doctest::Approx(anisotropy_g_legendre(0.3, 0.6)).epsilon(1e-12));
  CHECK(anisotropy_g_big(0.7, 0.2) == doctest::Approx(anisotropy_g_legendre(0.7, 0.2)).epsilon(1e-12));
  CHECK(anisotropy_g_big(0.6, 0.3) == doctest::Approx(anisotropy_g_big(0.3, 0.6)).epsilon(1e-14));
  // isotropic trap: no net direct interaction
  CHECK(std::abs(anisotropy_g_big(1.0, 1.0)) < 1e-14);
  CHECK(anisotropy_g_big(1e-3, 1e-3) == doctest::Approx(4 * pi / 3).epsilon(1e-2));
  CHECK(anisotropy_g_big(1e-6, 1e-6) == doctest::Approx(4 * pi / 3).epsilon(1e-5));
  // the Carlson form is fine at a = 1 where the Legendre form is not defined
  CHECK(std::isfinite(anisotropy_g_big(1.0, 0.5)));
  CHECK_THROWS(anisotropy_g_legendre(1.0, 0.5));
}

TEST_CASE("power-law fit") {
  std::vector<std::pair<double, double>> pts;
  for (int i = 20; i <= 60; i += 4) pts.emplace_back(i, -2.5 * std::pow(i, -3.0));
  const auto f = scaling_fit(pts);
  CHECK(f.exponent == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
  pts[3].second = 1.0;
  CHECK_THROWS(scaling_fit(pts));
  pts.resize(5);
  CHECK_THROWS(scaling_fit(pts));
}

TEST_CASE("semiclassical direct interaction") {
  std::vector<std::pair<double, double>> equal, fixed;
  for (int i = 20; i <= 60; i += 2) {
    equal.emplace_back(i, vd_semiclassical({2.0 * i, 2.0 * i, 0.3, 0.6}));
    fixed.emplace_back(i, vd_semiclassical({1.0, 2.0 * i, 0.3, 0.6}));
  }
  const auto fe = scaling_fit(equal);
  CHECK(fe.exponent == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(fe.residual < 1e-12);
  // with one energy held fixed g(b) ~ b^2/2 takes over and the decay is also close to -3/2
  const auto ff = scaling_fit(fixed);
  CHECK(ff.exponent == doctest::Approx(-1.5).epsilon(0.01));
  CHECK(vd_semiclassical({3.0, 5.0}) == vd_semiclassical({5.0, 3.0}));
}

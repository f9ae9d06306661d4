#include <doctest.h>

#include "molspin/potential.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>

using namespace molspin;
using std::numbers::pi;

namespace {

// Average of vdd_3d over the relative axial coordinate of two ground-state Gaussians,
// density exp(-z^2 / 2 a^2) / (a sqrt(2 pi)), by plain adaptive quadrature.
double convolved_3d(double r, double a) {
  struct P {
    double r, a;
  } p{r, a};
  gsl_function f;
  f.params = &p;
  f.function = [](double z, void* v) {
    const auto& q = *static_cast<P*>(v);
    const double w = std::exp(-z * z / (2 * q.a * q.a)) / (q.a * std::sqrt(2 * pi));
    return w * vdd_3d({q.r, 0.0, z});
  };
  gsl_set_error_handler_off();
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
  double res = 0, err = 0;
  gsl_integration_qagi(&f, 0.0, 1e-12, 2000, ws, &res, &err);
  gsl_integration_workspace_free(ws);
  return res;
}

}  // namespace

TEST_CASE("3D kernel") {
  const double R = 1.7;
  CHECK(vdd_3d({0, 0, R}) == doctest::Approx(-2 / (4 * pi * R * R * R)));
  CHECK(vdd_3d({R, 0, 0}) == doctest::Approx(1 / (4 * pi * R * R * R)));
  const double th = std::acos(1 / std::sqrt(3.0));
  CHECK(std::abs(vdd_3d({std::sin(th), 0, std::cos(th)})) < 1e-15);
  CHECK_THROWS(vdd_3d({0, 0, 0}));
}

TEST_CASE("quasi-2D real-space kernel") {
  SUBCASE("matches the convolution of the 3D kernel") {
    for (double r : {0.3, 1.0, 2.5})
      CHECK(vdd_2d_real(r, 1.0) == doctest::Approx(convolved_3d(r, 1.0)).epsilon(1e-8));
  }
  SUBCASE("dimensional scaling") {
    const double lam = 2.5;
    CHECK(vdd_2d_real(lam * 0.7, lam * 0.2) == doctest::Approx(vdd_2d_real(0.7, 0.2) / (lam * lam * lam)).epsilon(1e-12));
  }
  SUBCASE("far field") {
    // leading term 1/(4 pi r^3) with the first correction -9/2 (a/r)^2 from <z^2> = a^2
    for (double r : {20.0, 40.0}) {
      const double lead = 1 / (4 * pi * r * r * r);
      const double rel = vdd_2d_real(r, 1.0) / lead - 1;
      CHECK(rel == doctest::Approx(-4.5 / (r * r)).epsilon(0.05));
    }
    CHECK(std::abs(vdd_2d_real(40.0, 1.0) * 4 * pi * 64000 - 1) < 3e-3);
  }
  SUBCASE("log divergence at the origin") {
    const double a = vdd_2d_real(1e-6, 1.0), b = vdd_2d_real(1e-7, 1.0);
    CHECK(std::isfinite(a));
    // V ~ -(1/(a^3 sqrt(2 pi^3))) ln r as r -> 0, so one decade adds a fixed amount
    CHECK(b - a == doctest::Approx(a - vdd_2d_real(1e-5, 1.0)).epsilon(1e-4));
    CHECK(b > a);
  }
}

TEST_CASE("momentum kernel") {
  const double az = 0.05;
  CHECK(vdd_2d_momentum(0, az) == doctest::Approx(1 / (2 * az) * 2.0 / 3 * std::sqrt(2 / pi)).epsilon(1e-14));
  // large q: the erfcx form saturates at -(1/3) sqrt(2/pi) / (2 az)
  CHECK(vdd_2d_momentum(1e6, az) == doctest::Approx(-std::sqrt(2 / pi) / 3 / (2 * az)).epsilon(1e-6));
  // without the Gaussian factor the printed form stays positive at large q
  CHECK(vdd_2d_momentum_printed(1e3, az) > 0);
  CHECK(vdd_2d_momentum(1e3, az) < 0);
}

TEST_CASE("momentum kernel against the Hankel transform of the real-space kernel") {
  const double az = 0.05;
  const double q = 1 / az;
  const double numeric = vdd_2d_momentum_numeric(q, az);
  CHECK(vdd_2d_momentum(q, az) + vdd_2d_contact(az) == doctest::Approx(numeric).epsilon(1e-6));
  // the printed form drops exp(a^2 q^2 / 2) on the erfc term and misses by far more than 1e-3
  CHECK(std::abs(vdd_2d_momentum_printed(q, az) + vdd_2d_contact(az) - numeric) / numeric > 1e-3);
}

TEST_CASE("erfcx") {
  CHECK(erfcx(0) == 1.0);
  CHECK(erfcx(1.0) == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-13));
  CHECK(erfcx(50.0) == doctest::Approx(1 / (50.0 * std::sqrt(pi)) * (1 - 1 / (2 * 2500.0) + 3 / (4 * 2500.0 * 2500.0))).epsilon(1e-9));
}

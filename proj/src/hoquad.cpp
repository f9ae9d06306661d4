// Quadrature cross-checks for the oscillator-basis engine. None of this shares code with the
// Laguerre/hypergeometric route in hobasis.cpp.

#include "molspin/hobasis.hpp"
#include "molspin/potential.hpp"
#include "mp.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace molspin {

using std::numbers::pi;

double radial_integral_quadrature(int n, double c1) {
  const double A = 2.0 / 3.0 * std::sqrt(2 / pi);
  auto f = [&](double q) {
    const double cq = c1 * q;
    return std::pow(q, n + 1) * std::exp(-q * q / 2) * (A - cq * erfcx(cq / std::sqrt(2.0)));
  };
  const double top = std::sqrt(n + 1.0) + 14;
  double err = 0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, top, 15, 1e-14, &err);
}

double radial_integral_closed(int n, double c1, int bits) {
  // (1/3) 2^{-n/2-3/2} (2^{n+3} G(n/2+1)/sqrt(pi) - 3 c^{-n-2} G(n+3) 2F1~(a, b; cc; 1 - 1/c^2))
  // with a = (n+3)/2, b = (n+4)/2, cc = (n+5)/2. The argument is large and negative for small c,
  // so the series is taken after the Pfaff transformation: argument 1 - c^2, second parameter 1/2.
  using mp::Real;
  const mpfr_prec_t wp = bits + 32;
  const double a = (n + 3) / 2.0, cc = (n + 5) / 2.0;
  Real c(wp, c1), x(wp), t(wp), sum(wp), tmp(wp), eps(wp);
  mpfr_sqr(x.get(), c.get(), MPFR_RNDN);
  mpfr_ui_sub(x.get(), 1, x.get(), MPFR_RNDN);
  mpfr_set_ui(t.get(), 1, MPFR_RNDN);
  mpfr_set_ui(sum.get(), 1, MPFR_RNDN);
  for (long k = 0; k < 50000000; ++k) {
    // t *= (a+k)(1/2+k)/((cc+k)(k+1)) x
    mpfr_mul_d(t.get(), t.get(), (a + k) * (0.5 + k), MPFR_RNDN);
    mpfr_div_d(t.get(), t.get(), (cc + k) * (k + 1.0), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), x.get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), t.get(), MPFR_RNDN);
    mpfr_mul_2si(eps.get(), sum.get(), -static_cast<long>(wp), MPFR_RNDN);
    if (mpfr_cmpabs(t.get(), eps.get()) < 0 || mpfr_zero_p(t.get())) break;
  }
  // 2F1 = c^{n+3} sum; regularized divides by G(cc); c^{-n-2} c^{n+3} = c
  Real g(wp), second(wp), first(wp), sqpi(wp);
  mpfr_set_d(tmp.get(), cc, MPFR_RNDN);
  mpfr_gamma(g.get(), tmp.get(), MPFR_RNDN);
  mpfr_div(second.get(), sum.get(), g.get(), MPFR_RNDN);
  mpfr_mul(second.get(), second.get(), c.get(), MPFR_RNDN);
  mpfr_set_ui(tmp.get(), n + 3, MPFR_RNDN);
  mpfr_gamma(g.get(), tmp.get(), MPFR_RNDN);
  mpfr_mul(second.get(), second.get(), g.get(), MPFR_RNDN);
  mpfr_mul_ui(second.get(), second.get(), 3, MPFR_RNDN);

  mpfr_const_pi(sqpi.get(), MPFR_RNDN);
  mpfr_sqrt(sqpi.get(), sqpi.get(), MPFR_RNDN);
  mpfr_set_d(tmp.get(), n / 2.0 + 1, MPFR_RNDN);
  mpfr_gamma(first.get(), tmp.get(), MPFR_RNDN);
  mpfr_mul_2si(first.get(), first.get(), n + 3, MPFR_RNDN);
  mpfr_div(first.get(), first.get(), sqpi.get(), MPFR_RNDN);

  mpfr_sub(first.get(), first.get(), second.get(), MPFR_RNDN);
  mpfr_div_ui(first.get(), first.get(), 3, MPFR_RNDN);
  mpfr_set_d(tmp.get(), -n / 2.0 - 1.5, MPFR_RNDN);
  mpfr_ui_pow(tmp.get(), 2, tmp.get(), MPFR_RNDN);
  mpfr_mul(first.get(), first.get(), tmp.get(), MPFR_RNDN);
  return first.to_double();
}

namespace {

// Gauss-Hermite rule (weight e^{-x^2}) shared by all oracle calls.
struct HermiteRule {
  std::vector<double> x, w;
};

const HermiteRule& hermite_rule() {
  static std::once_flag once;
  static HermiteRule rule;
  std::call_once(once, [] {
    constexpr std::size_t n = 300;
    std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
        gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, n, 0.0, 1.0, 0.0, 0.0),
        &gsl_integration_fixed_free);
    const double* nodes = gsl_integration_fixed_nodes(ws.get());
    const double* weights = gsl_integration_fixed_weights(ws.get());
    rule.x.assign(nodes, nodes + n);
    rule.w.assign(weights, weights + n);
  });
  return rule;
}

// Normalized oscillator functions without the Gaussian: phi_n(x) = h_n(x) e^{-x^2/2}
std::vector<std::vector<double>> hermite_values(int nmax, const std::vector<double>& xs) {
  std::vector<std::vector<double>> h(nmax + 1, std::vector<double>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    double p0 = std::pow(pi, -0.25), p1 = std::sqrt(2.0) * x * p0;
    h[0][k] = p0;
    if (nmax >= 1) h[1][k] = p1;
    for (int n = 1; n < nmax; ++n) {
      const double p2 = std::sqrt(2.0 / (n + 1)) * x * p1 - std::sqrt(static_cast<double>(n) / (n + 1)) * p0;
      p0 = p1;
      p1 = p2;
      h[n + 1][k] = p1;
    }
  }
  return h;
}

// \int e^{i q x} phi_a phi_b dx as (re, im)
std::pair<double, double> ft_pair(const std::vector<double>& ha, const std::vector<double>& hb, double q) {
  const auto& r = hermite_rule();
  double re = 0, im = 0;
  for (std::size_t k = 0; k < r.x.size(); ++k) {
    const double p = r.w[k] * ha[k] * hb[k];
    re += p * std::cos(q * r.x[k]);
    im += p * std::sin(q * r.x[k]);
  }
  return {re, im};
}

}  // namespace

double matrix_element_quadrature(Mode i, Mode j, Mode k, Mode l, double c1) {
  const auto& rule = hermite_rule();
  const int nmax = std::max({i.nx, i.ny, j.nx, j.ny, k.nx, k.ny, l.nx, l.ny});
  const auto h = hermite_values(nmax, rule.x);
  const int deg = i.nx + j.nx + k.nx + l.nx + i.ny + j.ny + k.ny + l.ny;
  const int nphi = 4 * (deg + 8);

  // F_{il}(q) F_{jk}(-q) for one axis, complex
  auto axis = [&](int a1, int b1, int a2, int b2, double q) {
    const auto [r1, i1] = ft_pair(h[a1], h[b1], q);
    const auto [r2, i2] = ft_pair(h[a2], h[b2], -q);
    return std::pair<double, double>{r1 * r2 - i1 * i2, r1 * i2 + i1 * r2};
  };
  auto angular = [&](double q) {
    double acc = 0;
    for (int p = 0; p < nphi; ++p) {
      const double ph = 2 * pi * (p + 0.5) / nphi;
      const auto [xr, xi] = axis(i.nx, l.nx, j.nx, k.nx, q * std::cos(ph));
      const auto [yr, yi] = axis(i.ny, l.ny, j.ny, k.ny, q * std::sin(ph));
      acc += xr * yr - xi * yi;
    }
    return acc * 2 * pi / nphi;
  };
  auto radial = [&](double q) { return q * vdd_2d_momentum(q, c1) * angular(q); };
  double err = 0;
  const double qmax = std::min(16.0, 2 * std::sqrt(deg + 1.0) + 10);
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(radial, 0.0, qmax, 12, 1e-12, &err);
  return v / (4 * pi * pi);
}

}  // namespace molspin

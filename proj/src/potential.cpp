#include "molspin/potential.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_erf.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace molspin {

using std::numbers::pi;

double vdd_3d(const std::array<double, 3>& r) {
  const double r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
  if (!(r2 > 0)) throw std::domain_error("vdd_3d: zero separation");
  const double R = std::sqrt(r2);
  const double c2 = r[2] * r[2] / r2;
  return (1 - 3 * c2) / (4 * pi * R * r2);
}

double erfcx(double x) {
  if (x < 0) return 2 * std::exp(x * x) - erfcx(-x);
  return std::exp(x * x + gsl_sf_log_erfc(x));
}

double vdd_2d_real(double r, double a_z) {
  if (!(a_z > 0)) throw std::domain_error("vdd_2d_real: a_z must be positive");
  if (!(r > 0)) throw std::domain_error("vdd_2d_real: log-divergent at r = 0");
  const double u = r / a_z;
  const double x = u * u / 4;
  const double pre = 1 / (std::sqrt(32 * pi * pi * pi) * 2 * a_z * a_z * a_z);
  if (u > 30) {
    // The bracket cancels to O(1/x) relative, so use the Hankel expansion of e^x K_nu(x)
    // and cancel the leading orders analytically.
    auto coeff = [](double nu, int k) {
      double c = 1.0;
      for (int j = 1; j <= k; ++j) c *= (4 * nu * nu - (2.0 * j - 1) * (2.0 * j - 1)) / (8.0 * j);
      return c;
    };
    double sum = 0.0;
    double xp = 1.0;
    for (int k = 0; k < 12; ++k) {
      const double term = (2 * coeff(0, k) + 4 * (coeff(0, k + 1) - coeff(1, k + 1))) * xp;
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
      xp /= x;
    }
    return pre * std::sqrt(pi / (2 * x)) * sum;
  }
  if (x < 1e-12) {
    // K0 ~ -ln(x/2) - gamma, u^2 K1 ~ 4
    const double k0 = std::log(8.0) - 2 * std::log(u) - std::numbers::egamma;
    return pre * (2 * k0 - 4);
  }
  const double k0 = gsl_sf_bessel_K0_scaled(x);
  const double k1 = gsl_sf_bessel_K1_scaled(x);
  return pre * ((2 + u * u) * k0 - u * u * k1);
}

double vdd_2d_momentum(double q, double a_z) {
  const double A = 2.0 / 3.0 * std::sqrt(2 / pi);
  const double cq = a_z * q;
  return (A - cq * erfcx(cq / std::sqrt(2.0))) / (2 * a_z);
}

double vdd_2d_momentum_printed(double q, double a_z) {
  const double A = 2.0 / 3.0 * std::sqrt(2 / pi);
  const double cq = a_z * q;
  return (A - cq * std::erfc(cq / std::sqrt(2.0))) / (2 * a_z);
}

double vdd_2d_contact(double a_z) { return 1 / (3 * a_z * std::sqrt(2 * pi)); }

double vdd_2d_momentum_numeric(double q, double a_z) {
  using namespace boost::math::quadrature;
  auto f = [&](double r) { return r > 0 ? r * vdd_2d_real(r, a_z) : 0.0; };
  if (q == 0) {
    tanh_sinh<double> ts;
    exp_sinh<double> es;
    const double cut = 4 * a_z;
    return 2 * pi * (ts.integrate(f, 0.0, cut, 1e-14) + es.integrate(f, cut, INFINITY, 1e-14));
  }
  // integrate between zeros of J0(q r) and accelerate the alternating tail by repeated averaging
  auto g = [&](double r) { return f(r) * boost::math::cyl_bessel_j(0, q * r); };
  tanh_sinh<double> ts;
  double lo = 0.0;
  double acc = 0.0;
  std::vector<double> partial;
  for (int k = 1; k <= 400; ++k) {
    const double hi = boost::math::cyl_bessel_j_zero(0.0, k) / q;
    const double piece = (k == 1 || lo < 4 * a_z) ? ts.integrate(g, lo, hi, 1e-14)
                                                  : gauss_kronrod<double, 61>::integrate(g, lo, hi, 8, 1e-14);
    acc += piece;
    partial.push_back(acc);
    lo = hi;
  }
  std::vector<double> s(partial.end() - 40, partial.end());
  while (s.size() > 1) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] = 0.5 * (s[i] + s[i + 1]);
    s.pop_back();
  }
  return 2 * pi * s[0];
}

}  // namespace molspin

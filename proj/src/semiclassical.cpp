#include "molspin/semiclassical.hpp"

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/special_functions/ellint_rd.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace molspin {

using std::numbers::pi;

namespace {

// Taylor series of the numerator in m. The m^0 and m^1 coefficients cancel exactly, which is
// what makes the direct formula lose digits for small b.
double g_series(double m) {
  constexpr int terms = 80;
  double a[terms + 1];
  a[0] = 1;
  for (int n = 1; n <= terms; ++n) {
    const double r = (2.0 * n - 1) / (2.0 * n);
    a[n] = a[n - 1] * r * r;
  }
  auto e = [&](int n) { return n < 0 ? 0.0 : a[n] / (1 - 2.0 * n); };
  auto k = [&](int n) { return n < 0 ? 0.0 : a[n]; };
  double sum = 0, mp = m;  // m^{n-1}
  for (int n = 2; n <= terms; ++n) {
    const double c = 16 * (e(n) - e(n - 1) + e(n - 2)) - 8 * (2 * k(n) - 3 * k(n - 1) + k(n - 2));
    sum += c * mp;
    mp *= m;
  }
  return sum / 30;
}

}  // namespace

double g_function(double b) {
  if (!(b > 0 && b <= 1)) throw std::domain_error("g_function: b must lie in (0, 1]");
  if (b == 1) return 16 / (15 * pi);
  const double m = b * b;
  if (m < 0.2) return g_series(m);
  // boost takes the modulus
  const double E = boost::math::ellint_2(b), K = boost::math::ellint_1(b);
  return (16 * (m * m - m + 1) * E - 8 * (m * m - 3 * m + 2) * K) / (15 * pi * m);
}

double anisotropy_g_big(double a, double b) {
  if (!(a > 0 && b > 0)) throw std::domain_error("anisotropy_g_big: ratios must be positive");
  return 4 * pi / 3 * (1 - a * b * boost::math::ellint_rd(a * a, b * b, 1.0));
}

double anisotropy_g_legendre(double a, double b) {
  if (!(a > 0 && a < 1 && b > 0 && b < 1)) throw std::domain_error("anisotropy_g_legendre: needs a, b in (0, 1)");
  const double s = std::sqrt(1 - a * a);
  const double phi = std::asin(s);
  const double k = (1 - b * b) / (1 - a * a);
  const double mod = std::sqrt(k);
  const double E = boost::math::ellint_2(mod, phi), F = boost::math::ellint_1(mod, phi);
  return 4 * pi / 3 * (3 * a * b * (E - F) / (s * (1 - b * b)) + 1);
}

double vd_semiclassical(const SemiclassicalInput& in) {
  double e1 = in.e1, e2 = in.e2;
  if (!(e1 > 0 && e2 > 0)) throw std::domain_error("vd_semiclassical: energies must be positive");
  if (e1 > e2) std::swap(e1, e2);
  const double nd = 16 / (std::pow(2 * pi, 3) * e1 * e2);
  return nd * std::sqrt(2 * e2) * g_function(std::sqrt(e1 / e2)) * anisotropy_g_big(in.anis_x, in.anis_y);
}

PowerFit scaling_fit(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 8) throw std::invalid_argument("scaling_fit: need at least 8 points");
  const bool neg = pts.front().second < 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [i, v] : pts) {
    if (v == 0 || (v < 0) != neg) throw std::invalid_argument("scaling_fit: sign change or zero in window");
    if (!(i > 0)) throw std::invalid_argument("scaling_fit: index must be positive");
    const double x = std::log(i), y = std::log(std::abs(v));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  PowerFit f;
  f.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - f.exponent * sx) / n;
  f.prefactor = (neg ? -1 : 1) * std::exp(icpt);
  for (const auto& [i, v] : pts) {
    const double r = std::log(std::abs(v)) - icpt - f.exponent * std::log(i);
    f.residual += r * r;
  }
  f.residual = std::sqrt(f.residual / n);
  return f;
}

}  // namespace molspin

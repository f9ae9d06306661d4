#include "molspin/hobasis.hpp"

#include "molspin/potential.hpp"
#include "mp.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace molspin {

using std::numbers::pi;

ModeSet ModeSet::shell_fill(std::size_t n) {
  ModeSet ms;
  for (int e = 0; ms.modes.size() < n; ++e)
    for (int nx = e; nx >= 0 && ms.modes.size() < n; --nx) ms.modes.push_back({nx, e - nx});
  ms.occupancy.assign(ms.modes.size(), 1.0);
  return ms;
}

ModeSet ModeSet::pool(int e_max) {
  ModeSet ms;
  for (int e = 0; e <= e_max; ++e)
    for (int nx = e; nx >= 0; --nx) ms.modes.push_back({nx, e - nx});
  ms.occupancy.assign(ms.modes.size(), 0.0);
  return ms;
}

std::uint64_t ModeSet::digest() const {
  // FNV-1a over the mode labels
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (const auto& m : modes) {
    mix(static_cast<std::uint64_t>(m.nx));
    mix(static_cast<std::uint64_t>(m.ny));
  }
  return h;
}

namespace {

mpz_class factorial(unsigned n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

}  // namespace

mpq_class laguerre_coeff(int n, int k, int m) {
  if (n < 0 || k < 0 || m < 0 || m > n) throw std::domain_error("laguerre_coeff: need 0 <= m <= n");
  mpq_class r(factorial(n + k), factorial(m) * factorial(k + m) * factorial(n - m));
  r.canonicalize();
  return (m % 2) ? mpq_class(-r) : r;
}

double angular_integral(int n1, int n2) {
  if (n1 < 0 || n2 < 0) throw std::domain_error("angular_integral: negative power");
  if (n1 % 2 || n2 % 2) return 0.0;
  return 2 * std::exp(std::lgamma((1 + n1) / 2.0) + std::lgamma((1 + n2) / 2.0) - std::lgamma((2 + n1 + n2) / 2.0));
}

namespace {

using mp::Real;

// J(2s) for s = 0..smax, with `bits` of working precision plus guard bits.
std::vector<Real> radial_series(int smax, double c1, mpfr_prec_t bits) {
  if (!(c1 > 0) || c1 > 1) throw std::domain_error("radial_integral: need 0 < c1 <= 1");
  const mpfr_prec_t wp = bits + 64;
  Real c(wp, c1), c2(wp), one_m(wp), sqpi(wp), pi_(wp);
  mpfr_sqr(c2.get(), c.get(), MPFR_RNDN);
  mpfr_ui_sub(one_m.get(), 1, c2.get(), MPFR_RNDN);
  mpfr_const_pi(pi_.get(), MPFR_RNDN);
  mpfr_sqrt(sqpi.get(), pi_.get(), MPFR_RNDN);
  const bool small = c1 * c1 < 0.5;

  std::vector<Real> out;
  out.reserve(smax + 1);
  Real t(wp), sum(wp), tmp(wp), g1(wp), g32(wp), g52(wp), K(wp), B(wp), J(wp), eps(wp);
  for (int s = 0; s <= smax; ++s) {
    // gamma(s+1), gamma(s+3/2), gamma(s+5/2)
    mpfr_set_ui(tmp.get(), s + 1, MPFR_RNDN);
    mpfr_gamma(g1.get(), tmp.get(), MPFR_RNDN);
    mpfr_set_d(tmp.get(), s + 1.5, MPFR_RNDN);
    mpfr_gamma(g32.get(), tmp.get(), MPFR_RNDN);
    mpfr_set_d(tmp.get(), s + 2.5, MPFR_RNDN);
    mpfr_gamma(g52.get(), tmp.get(), MPFR_RNDN);

    // hypergeometric series with positive terms
    mpfr_set_ui(t.get(), 1, MPFR_RNDN);
    mpfr_set_ui(sum.get(), 1, MPFR_RNDN);
    for (long k = 0; k < 1000000; ++k) {
      if (small) {
        mpfr_mul_ui(t.get(), t.get(), s + 1 + k, MPFR_RNDN);
        mpfr_mul_ui(t.get(), t.get(), 2, MPFR_RNDN);
        mpfr_div_ui(t.get(), t.get(), 2 * k + 1, MPFR_RNDN);
        mpfr_mul(t.get(), t.get(), c2.get(), MPFR_RNDN);
      } else {
        mpfr_mul_ui(t.get(), t.get(), 2 * (s + 1 + k), MPFR_RNDN);
        mpfr_div_ui(t.get(), t.get(), 2 * s + 5 + 2 * k, MPFR_RNDN);
        mpfr_mul(t.get(), t.get(), one_m.get(), MPFR_RNDN);
      }
      mpfr_add(sum.get(), sum.get(), t.get(), MPFR_RNDN);
      if (mpfr_zero_p(t.get())) break;
      mpfr_mul_2si(eps.get(), sum.get(), -static_cast<long>(wp), MPFR_RNDN);
      if (mpfr_cmpabs(t.get(), eps.get()) < 0) break;
    }

    if (small) {
      // K = sqrt(pi)/4 (2s+3) G(s+1)/G(s+5/2) F - (pi/2) c (1-c^2)^(-s-3/2)
      mpfr_mul(K.get(), sqpi.get(), g1.get(), MPFR_RNDN);
      mpfr_mul_ui(K.get(), K.get(), 2 * s + 3, MPFR_RNDN);
      mpfr_div(K.get(), K.get(), g52.get(), MPFR_RNDN);
      mpfr_div_ui(K.get(), K.get(), 4, MPFR_RNDN);
      mpfr_mul(K.get(), K.get(), sum.get(), MPFR_RNDN);
      mpfr_set_d(tmp.get(), -(s + 1.5), MPFR_RNDN);
      mpfr_pow(tmp.get(), one_m.get(), tmp.get(), MPFR_RNDN);
      mpfr_mul(tmp.get(), tmp.get(), c.get(), MPFR_RNDN);
      mpfr_mul(tmp.get(), tmp.get(), pi_.get(), MPFR_RNDN);
      mpfr_div_ui(tmp.get(), tmp.get(), 2, MPFR_RNDN);
      mpfr_sub(K.get(), K.get(), tmp.get(), MPFR_RNDN);
    } else {
      // K = B(s+1, 3/2)/2 F, with G(3/2) = sqrt(pi)/2
      mpfr_mul(K.get(), g1.get(), sqpi.get(), MPFR_RNDN);
      mpfr_div(K.get(), K.get(), g52.get(), MPFR_RNDN);
      mpfr_div_ui(K.get(), K.get(), 4, MPFR_RNDN);
      mpfr_mul(K.get(), K.get(), sum.get(), MPFR_RNDN);
    }
    // B = B(s+1, 1/2)/2
    mpfr_mul(B.get(), g1.get(), sqpi.get(), MPFR_RNDN);
    mpfr_div(B.get(), B.get(), g32.get(), MPFR_RNDN);
    mpfr_div_ui(B.get(), B.get(), 2, MPFR_RNDN);
    // J = (2/pi) 2^(s+1/2) G(s+3/2) (K - B/3)
    mpfr_div_ui(B.get(), B.get(), 3, MPFR_RNDN);
    mpfr_sub(J.get(), K.get(), B.get(), MPFR_RNDN);
    mpfr_mul(J.get(), J.get(), g32.get(), MPFR_RNDN);
    mpfr_set_ui(tmp.get(), 2, MPFR_RNDN);
    mpfr_sqrt(tmp.get(), tmp.get(), MPFR_RNDN);
    mpfr_mul(J.get(), J.get(), tmp.get(), MPFR_RNDN);
    mpfr_mul_2si(J.get(), J.get(), s + 1, MPFR_RNDN);
    mpfr_div(J.get(), J.get(), pi_.get(), MPFR_RNDN);
    out.push_back(J);
  }
  return out;
}

}  // namespace

double radial_integral(int n, double c1) {
  if (n < 0 || n % 2) throw std::domain_error("radial_integral: n must be even and non-negative");
  return radial_series(n / 2, c1, 128).back().to_double();
}

std::string radial_integral_digits(int n, double c1, int bits, int digits) {
  if (n < 0 || n % 2) throw std::domain_error("radial_integral: n must be even and non-negative");
  const auto v = radial_series(n / 2, c1, bits);
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v.back().get());
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

namespace {

// Exact part of an element: sign * sqrt(sqrt_arg) * sum_s q[s] J(2s)
struct ExactPart {
  bool zero = false;
  int sign = 1;
  mpq_class sqrt_arg = 1;
  std::vector<mpq_class> q;
};

std::vector<mpq_class> laguerre_poly(int n, int k) {
  std::vector<mpq_class> p(n + 1);
  for (int m = 0; m <= n; ++m) p[m] = laguerre_coeff(n, k, m);
  return p;
}

std::vector<mpq_class> poly_mul(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
  std::vector<mpq_class> r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

// Per axis: F_{a1 b1}(q) F_{a2 b2}(-q) e^{q^2/2} as a polynomial in t = q^2/2.
bool axis_poly(int a1, int b1, int a2, int b2, std::vector<mpq_class>& poly, int& sign, mpq_class& sqrt_arg) {
  const int n1 = std::min(a1, b1), k1 = std::abs(a1 - b1);
  const int n2 = std::min(a2, b2), k2 = std::abs(a2 - b2);
  if ((k1 + k2) % 2) return false;
  // i^(k1+k2) (-1)^k2
  if (((k1 + k2) / 2 + k2) % 2) sign = -sign;
  sqrt_arg *= mpq_class(factorial(n1), factorial(n1 + k1));
  sqrt_arg *= mpq_class(factorial(n2), factorial(n2 + k2));
  sqrt_arg.canonicalize();
  auto p = poly_mul(laguerre_poly(n1, k1), laguerre_poly(n2, k2));
  poly.assign((k1 + k2) / 2, 0);
  poly.insert(poly.end(), p.begin(), p.end());
  return true;
}

ExactPart exact_part(Mode i, Mode j, Mode k, Mode l) {
  ExactPart e;
  std::vector<mpq_class> px, py;
  // pair (i, l) sits at r, pair (j, k) at r'
  if (!axis_poly(i.nx, l.nx, j.nx, k.nx, px, e.sign, e.sqrt_arg) ||
      !axis_poly(i.ny, l.ny, j.ny, k.ny, py, e.sign, e.sqrt_arg)) {
    e.zero = true;
    return e;
  }
  const int smax = static_cast<int>(px.size() + py.size()) - 2;
  std::vector<mpz_class> fac(2 * smax + 2);
  for (std::size_t n = 0; n < fac.size(); ++n) fac[n] = factorial(static_cast<unsigned>(n));
  e.q.assign(smax + 1, 0);
  for (std::size_t a = 0; a < px.size(); ++a) {
    if (px[a] == 0) continue;
    for (std::size_t b = 0; b < py.size(); ++b) {
      if (py[b] == 0) continue;
      const std::size_t s = a + b;
      // R(a,b) = (2a)!(2b)! / (8^s a! b! s!), the angular integral over 2 pi with the 2^-s of t
      mpz_class den = fac[a] * fac[b] * fac[s];
      mpz_class eight;
      mpz_ui_pow_ui(eight.get_mpz_t(), 8, s);
      den *= eight;
      mpq_class r(fac[2 * a] * fac[2 * b], den);
      r.canonicalize();
      e.q[s] += px[a] * py[b] * r;
    }
  }
  return e;
}

ElementValue evaluate(const ExactPart& e, double c1, int bits) {
  ElementValue ev;
  ev.bits = bits;
  if (e.zero) return ev;
  const int smax = static_cast<int>(e.q.size()) - 1;
  const auto J = radial_series(smax, c1, bits);
  const mpfr_prec_t wp = bits + 64;
  Real sum(wp), term(wp), qv(wp), maxterm(wp);
  for (int s = 0; s <= smax; ++s) {
    if (e.q[s] == 0) continue;
    mpfr_set_q(qv.get(), e.q[s].get_mpq_t(), MPFR_RNDN);
    mpfr_mul(term.get(), qv.get(), J[s].get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    if (mpfr_cmpabs(term.get(), maxterm.get()) > 0) mpfr_abs(maxterm.get(), term.get(), MPFR_RNDN);
  }
  if (!mpfr_zero_p(sum.get()))
    ev.cancellation = std::log10(mpfr_get_d(maxterm.get(), MPFR_RNDN) / std::abs(mpfr_get_d(sum.get(), MPFR_RNDN)));
  // times sign sqrt(arg) / (2 c1) / (2 pi)
  Real f(wp), pi_(wp);
  mpfr_set_q(f.get(), e.sqrt_arg.get_mpq_t(), MPFR_RNDN);
  mpfr_sqrt(f.get(), f.get(), MPFR_RNDN);
  mpfr_mul(sum.get(), sum.get(), f.get(), MPFR_RNDN);
  mpfr_const_pi(pi_.get(), MPFR_RNDN);
  mpfr_div(sum.get(), sum.get(), pi_.get(), MPFR_RNDN);
  mpfr_set_d(f.get(), c1, MPFR_RNDN);
  mpfr_div(sum.get(), sum.get(), f.get(), MPFR_RNDN);
  mpfr_div_ui(sum.get(), sum.get(), 4, MPFR_RNDN);
  ev.value = e.sign * sum.to_double();
  return ev;
}

}  // namespace

ElementValue matrix_element_fixed(Mode i, Mode j, Mode k, Mode l, double c1, int bits) {
  return evaluate(exact_part(i, j, k, l), c1, bits);
}

ElementValue matrix_element(Mode i, Mode j, Mode k, Mode l, double c1, const PrecisionPolicy& pol) {
  const auto e = exact_part(i, j, k, l);
  if (e.zero) return {0.0, pol.start_bits, 0.0};
  auto prev = evaluate(e, c1, pol.start_bits);
  for (int bits = 2 * pol.start_bits; bits <= pol.max_bits; bits *= 2) {
    auto cur = evaluate(e, c1, bits);
    const double scale = std::max(std::abs(cur.value), 1e-300);
    if (std::abs(cur.value - prev.value) <= pol.rel_tol * scale) {
      cur.bits = prev.bits;
      return cur;
    }
    prev = cur;
  }
  std::ostringstream os;
  os << "matrix_element: no stable value below " << pol.max_bits << " bits for modes (" << i.nx << "," << i.ny
     << ")(" << j.nx << "," << j.ny << ")(" << k.nx << "," << k.ny << ")(" << l.nx << "," << l.ny << ")";
  throw std::runtime_error(os.str());
}

// ---------------------------------------------------------------------------------------------
// Pair table

namespace {

// out[n] = e^{-x/2} L_n(x), n = 0..m, by the three-term recurrence with a running scale
void laguerre_functions(int m, double x, double* out) {
  double logs = -x / 2;
  double y0 = 1.0, y1 = 1.0 - x;
  out[0] = std::exp(logs);
  if (m >= 1) out[1] = y1 * std::exp(logs);
  for (int n = 1; n < m; ++n) {
    const double y2 = ((2 * n + 1 - x) * y1 - n * y0) / (n + 1);
    y0 = y1;
    y1 = y2;
    if (std::abs(y1) > 1e150) {
      y0 *= 1e-150;
      y1 *= 1e-150;
      logs += 150 * std::log(10.0);
    }
    out[n + 1] = y1 * std::exp(logs);
  }
}

}  // namespace

PairTable::PairTable(int max_index, double c1) : m_(max_index), c1_(c1) {
  if (max_index < 0) throw std::invalid_argument("PairTable: negative index");
  const int M = 2 * m_;
  const int dim = M + 1;

  // W(nx, ny) = (2 pi)^-2 \int d^2k l_nx(kx^2) l_ny(ky^2) V(k)
  const double kmax = 2 * std::sqrt(M + 1.0) + 12;
  const int panels = static_cast<int>(std::ceil(kmax));
  const int P = 4 * (M + 2);  // trapezoid points on the circle; exact for this trig degree
  const int quarter = P / 4;
  std::vector<double> ang_w(quarter + 1, 4.0);
  ang_w[0] = ang_w[quarter] = 2.0;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd Lx(dim, quarter + 1), Ly(dim, quarter + 1);
  std::vector<double> buf(dim);
  using GL = boost::math::quadrature::gauss<double, 24>;
  const auto& abs = GL::abscissa();
  const auto& wts = GL::weights();
  std::vector<std::pair<double, double>> nodes;
  for (int p = 0; p < panels; ++p) {
    const double mid = p + 0.5;
    for (std::size_t a = 0; a < abs.size(); ++a) {
      nodes.push_back({mid + 0.5 * abs[a], 0.5 * wts[a]});
      if (abs[a] != 0) nodes.push_back({mid - 0.5 * abs[a], 0.5 * wts[a]});
    }
  }
  for (const auto& [k, wk] : nodes) {
    const double scale = wk * k * vdd_2d_momentum(k, c1_) * (2 * pi / P);
    for (int j = 0; j <= quarter; ++j) {
      const double ph = 2 * pi * j / P;
      const double cx = std::cos(ph), sy = std::sin(ph);
      laguerre_functions(M, k * k * cx * cx, buf.data());
      for (int n = 0; n < dim; ++n) Lx(n, j) = buf[n] * ang_w[j] * scale;
      laguerre_functions(M, k * k * sy * sy, buf.data());
      for (int n = 0; n < dim; ++n) Ly(n, j) = buf[n];
    }
    W.noalias() += Lx * Ly.transpose();
  }
  W /= (4 * pi * pi);
  w_.assign(W.data(), W.data() + W.size());  // column-major: W(nx, ny) at nx + dim*ny

  // 1D Talmi-Moshinsky brackets D[n1][n2][N] with relative index n = n1 + n2 - N
  const int stride_n2 = M + 1;
  const int stride_n1 = (m_ + 1) * stride_n2;
  d_.assign(static_cast<std::size_t>(m_ + 1) * stride_n1, 0.0);
  auto at = [&](int n1, int n2, int N) -> double& { return d_[n1 * stride_n1 + n2 * stride_n2 + N]; };
  at(0, 0, 0) = 1.0;
  // Raising n1 is only stable for n1 >= n2 (the step amplifies rounding by (n1 + n2) / 2 n1);
  // the other half follows from x_rel -> -x_rel under 1 <-> 2: D[n2][n1][N] = (-1)^n D[n1][n2][N].
  for (int tot = 1; tot <= 2 * m_; ++tot)
    for (int n2 = std::max(0, tot - m_); 2 * n2 <= tot; ++n2) {
      const int n1 = tot - n2;
      const int s = tot - 1;
      const double r = 1 / std::sqrt(2.0 * n1);
      for (int N = 0; N <= s; ++N) {
        const double v = at(n1 - 1, n2, N);
        if (v == 0) continue;
        at(n1, n2, N + 1) += std::sqrt(N + 1.0) * v * r;
        at(n1, n2, N) += std::sqrt(s - N + 1.0) * v * r;
      }
      if (n1 != n2)
        for (int N = 0; N <= tot; ++N) at(n2, n1, N) = ((tot - N) % 2 ? -1.0 : 1.0) * at(n1, n2, N);
    }
}

double PairTable::bracket(int n1, int n2, int big) const {
  const int M = 2 * m_;
  return d_[(n1 * (m_ + 1) + n2) * (M + 1) + big];
}

std::pair<double, double> PairTable::hartree_fock(Mode a, Mode b) const {
  if (std::max({a.nx, a.ny, b.nx, b.ny}) > m_) throw std::out_of_range("PairTable: mode index above table cap");
  const int dim = 2 * m_ + 1;
  const int sx = a.nx + b.nx, sy = a.ny + b.ny;
  double h = 0.0, f = 0.0;
  for (int Ny = 0; Ny <= sy; ++Ny) {
    const double dy = bracket(a.ny, b.ny, Ny);
    if (dy == 0) continue;
    const int ny = sy - Ny;
    double hx = 0.0, fx = 0.0;
    for (int Nx = 0; Nx <= sx; ++Nx) {
      const double dx = bracket(a.nx, b.nx, Nx);
      const int nx = sx - Nx;
      const double t = dx * dx * w_[nx + dim * ny];
      hx += t;
      fx += (nx % 2) ? -t : t;
    }
    h += dy * dy * hx;
    f += dy * dy * ((ny % 2) ? -fx : fx);
  }
  return {h, f};
}

double v_ho(const PairTable& t, Mode m) {
  const auto [h, f] = t.hartree_fock({0, 0}, m);
  return h - f;
}

InteractionTable build_interaction_table(const ModeSet& ms, const PairTable& pt, Exec exec) {
  InteractionTable t;
  t.modes = ms;
  t.c1 = pt.c1();
  t.method = "pair-table";
  t.precision_bits = 53;
  const std::size_t n = ms.size();
  t.hartree.assign(n * n, 0.0);
  t.fock.assign(n * n, 0.0);
  for (const auto& m : ms.modes)
    if (std::max(m.nx, m.ny) > pt.max_index())
      throw std::out_of_range("build_interaction_table: mode index above pair-table range");
  const long nn = static_cast<long>(n);
  // rows are independent: row i fills (i, j > i) and the mirror
  auto row = [&](long i) {
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j) {
      const auto [h, f] = pt.hartree_fock(ms.modes[i], ms.modes[j]);
      t.hartree[i * n + j] = t.hartree[j * n + i] = h;
      t.fock[i * n + j] = t.fock[j * n + i] = f;
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < nn; ++i) row(i);
  } else {
    for (long i = 0; i < nn; ++i) row(i);
  }
  return t;
}

InteractionTable build_interaction_table(const ModeSet& ms, double c1, TableMethod method, Exec exec,
                                         int max_index) {
  int top = 0;
  for (const auto& m : ms.modes) top = std::max({top, m.nx, m.ny});
  if (top > max_index) throw std::out_of_range("build_interaction_table: mode index above cap");
  if (method == TableMethod::PairTable) return build_interaction_table(ms, PairTable(top, c1), exec);

  InteractionTable t;
  t.modes = ms;
  t.c1 = c1;
  t.method = "quasi-closed";
  const std::size_t n = ms.size();
  t.hartree.assign(n * n, 0.0);
  t.fock.assign(n * n, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
  const long np = static_cast<long>(pairs.size());
  std::vector<int> bits(np, 0);
  auto body = [&](long p) {
    const auto [i, j] = pairs[p];
    const auto h = hartree_element(ms.modes[i], ms.modes[j], c1);
    const auto f = fock_element(ms.modes[i], ms.modes[j], c1);
    t.hartree[i * n + j] = t.hartree[j * n + i] = h.value;
    t.fock[i * n + j] = t.fock[j * n + i] = f.value;
    bits[p] = std::max(h.bits, f.bits);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long p = 0; p < np; ++p) body(p);
  } else {
    for (long p = 0; p < np; ++p) body(p);
  }
  t.precision_bits = bits.empty() ? 128 : *std::max_element(bits.begin(), bits.end());
  return t;
}

// ---------------------------------------------------------------------------------------------
// Cache: one JSON header line, then the two dense matrices as raw little-endian doubles.

namespace {
constexpr int kCacheVersion = 1;
}

void save_interaction_table(const InteractionTable& t, const std::string& path) {
  nlohmann::json hdr;
  hdr["version"] = kCacheVersion;
  hdr["c1"] = t.c1;
  hdr["method"] = t.method;
  hdr["precision_bits"] = t.precision_bits;
  hdr["digest"] = t.modes.digest();
  std::vector<int> flat;
  for (const auto& m : t.modes.modes) {
    flat.push_back(m.nx);
    flat.push_back(m.ny);
  }
  hdr["modes"] = flat;
  hdr["occupancy"] = t.modes.occupancy;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write table cache: " + path);
  os << hdr.dump() << '\n';
  os.write(reinterpret_cast<const char*>(t.hartree.data()), static_cast<std::streamsize>(t.hartree.size() * 8));
  os.write(reinterpret_cast<const char*>(t.fock.data()), static_cast<std::streamsize>(t.fock.size() * 8));
  if (!os) throw std::runtime_error("failed writing table cache: " + path);
}

InteractionTable load_interaction_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read table cache: " + path);
  std::string line;
  std::getline(is, line);
  const auto hdr = nlohmann::json::parse(line);
  if (hdr.at("version").get<int>() != kCacheVersion) throw std::runtime_error("table cache version mismatch");
  InteractionTable t;
  t.c1 = hdr.at("c1").get<double>();
  t.method = hdr.at("method").get<std::string>();
  t.precision_bits = hdr.at("precision_bits").get<int>();
  const auto flat = hdr.at("modes").get<std::vector<int>>();
  for (std::size_t k = 0; k + 1 < flat.size(); k += 2) t.modes.modes.push_back({flat[k], flat[k + 1]});
  t.modes.occupancy = hdr.at("occupancy").get<std::vector<double>>();
  const std::size_t n = t.modes.size();
  t.hartree.resize(n * n);
  t.fock.resize(n * n);
  is.read(reinterpret_cast<char*>(t.hartree.data()), static_cast<std::streamsize>(n * n * 8));
  is.read(reinterpret_cast<char*>(t.fock.data()), static_cast<std::streamsize>(n * n * 8));
  if (!is) throw std::runtime_error("truncated table cache: " + path);
  if (hdr.at("digest").get<std::uint64_t>() != t.modes.digest()) throw std::runtime_error("table cache digest mismatch");
  return t;
}

InteractionTable cached_interaction_table(const ModeSet& ms, double c1, const std::string& cache_dir,
                                          TableMethod method) {
  namespace fs = std::filesystem;
  std::ostringstream name;
  name << "table-" << std::hex << ms.digest() << std::dec << "-" << (method == TableMethod::PairTable ? "pt" : "qc")
       << "-" << std::hexfloat << c1 << ".bin";
  const fs::path path = fs::path(cache_dir) / name.str();
  if (fs::exists(path)) {
    try {
      auto t = load_interaction_table(path.string());
      if (t.c1 == c1) {
        t.modes.occupancy = ms.occupancy;
        return t;
      }
    } catch (const std::exception& e) {
      std::cerr << "warning: rebuilding interaction table (" << e.what() << ")\n";
    }
  }
  auto t = build_interaction_table(ms, c1, method);
  fs::create_directories(cache_dir);
  save_interaction_table(t, path.string());
  return t;
}

}  // namespace molspin

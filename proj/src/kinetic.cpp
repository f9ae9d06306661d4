#include "molspin/kinetic.hpp"

#include "molspin/rng.hpp"

#include <gsl/gsl_sf_dilog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace molspin {

using std::numbers::pi;

double dipole_length(const TrapGeometry& g, double mu_ud) {
  const double d = mu_ud * g.dipole;
  return d * d / (8 * pi * si::eps0) * g.mass / (si::hbar * si::hbar);
}

double a3d_from_dipole_length(double a_dd) { return std::sqrt(32 * pi / 15 * a_dd * a_dd / (4 * pi)); }

double a2d_from_geometry(const TrapGeometry& g, double a_3d) {
  if (a_3d == 0 || !std::isfinite(a_3d)) throw std::domain_error("a2d_from_geometry: a_3d must be finite and nonzero");
  constexpr double B = 0.905;
  const double az = g.a_z();
  const double e = -std::sqrt(pi / 2) * az / a_3d;
  if (e > 700) throw std::domain_error("a2d_from_geometry: a_3d too small and negative");
  return az * std::sqrt(pi / B) * std::exp(e);
}

double bound_state_energy(const TrapGeometry& g, double a_2d) {
  const double r = g.a_perp() / a_2d;
  return r * r;
}

double semiclassical_mu(double n, double t) {
  if (!(n > 0 && t > 0)) throw std::invalid_argument("semiclassical_mu: need n > 0 and T > 0");
  auto count = [&](double x) { return -t * t * gsl_sf_dilog(-std::exp(x)); };
  double lo = -60, hi = std::sqrt(2 * n) / t + 20;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) < n ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) * t;
}

double relaxation_denominator(double beta, double mu) {
  return -gsl_sf_dilog(-std::exp(beta * mu)) / (beta * beta * beta);
}

namespace {

struct Normal {
  std::mt19937_64& g;
  double spare = 0;
  bool has = false;
  double operator()() {
    if (has) {
      has = false;
      return spare;
    }
    double u1 = uniform01(g);
    while (u1 == 0) u1 = uniform01(g);
    const double u2 = uniform01(g);
    const double r = std::sqrt(-2 * std::log(u1));
    spare = r * std::sin(2 * pi * u2);
    has = true;
    return r * std::cos(2 * pi * u2);
  }
};

}  // namespace

RelaxationRate relaxation_rate(const KineticParams& kp, std::size_t samples, std::uint64_t seed, Exec exec,
                               double max_rel_error) {
  if (samples < 1000) throw std::invalid_argument("relaxation_rate: need at least 1000 samples");
  const double ef = std::sqrt(2 * kp.n);
  const double t = kp.t_over_tf * ef;
  if (!(t > 0)) throw std::invalid_argument("relaxation_rate: temperature must be positive");
  const double beta = 1 / t;
  const double mu = semiclassical_mu(kp.n, t);
  const double a3 = kp.a_3d != 0 ? kp.a_3d : a3d_from_dipole_length(dipole_length(kp.geom));
  const double eb = bound_state_energy(kp.geom, a2d_from_geometry(kp.geom, a3));
  const double mr = 0.5;

  // Gaussian envelopes for r, P, p_r
  const double s = std::sqrt(std::max(t, ef / 3));
  const double sr = s, sP = std::sqrt(2.0) * s, sp = s / std::sqrt(2.0);
  auto f = [&](double px, double py, double u) {
    const double x = beta * (0.5 * (px * px + py * py) + u - mu);
    return x > 700 ? 0.0 : 1 / (std::exp(x) + 1);
  };
  auto gauss2 = [](double x, double y, double sig) {
    return std::exp(-(x * x + y * y) / (2 * sig * sig)) / (2 * pi * sig * sig);
  };

  constexpr std::size_t chunk = 1 << 14;
  const std::size_t nchunks = (samples + chunk - 1) / chunk;
  std::vector<double> sum(nchunks, 0.0), sum2(nchunks, 0.0);
  auto run = [&](std::size_t c) {
    auto g = make_stream(seed, c);
    Normal nd{g};
    const std::size_t count = std::min(chunk, samples - c * chunk);
    double a = 0, b = 0;
    for (std::size_t k = 0; k < count; ++k) {
      const double rx = sr * nd(), ry = sr * nd();
      const double Px = sP * nd(), Py = sP * nd();
      const double qx = sp * nd(), qy = sp * nd();
      const double th2 = 2 * pi * uniform01(g);
      const double pdf = gauss2(rx, ry, sr) * gauss2(Px, Py, sP) * gauss2(qx, qy, sp) / (2 * pi);
      const double q = std::hypot(qx, qy);
      const double th = std::atan2(qy, qx);
      const double q2x = q * std::cos(th2), q2y = q * std::sin(th2);
      const double u = 0.5 * (rx * rx + ry * ry);
      const double ff = f(Px / 2 - qx, Py / 2 - qy, u) * f(Px / 2 + qx, Py / 2 + qy, u) *
                        (1 - f(Px / 2 - q2x, Py / 2 - q2y, u)) * (1 - f(Px / 2 + q2x, Py / 2 + q2y, u));
      double v = 0;
      if (ff > 0 && q > 0) {
        const double eps = q * q / (2 * mr);
        const double l = std::log(eb / eps);
        const double t2 = (2 * pi / mr) * (2 * pi / mr) / (l * l + pi * pi);
        v = mr * t2 * q * q * (1 - std::cos(th - th2)) * ff / std::pow(2 * pi, 4) / pdf;
      }
      a += v;
      b += v * v;
    }
    sum[c] = a;
    sum2[c] = b;
  };
  const long nc = static_cast<long>(nchunks);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < nc; ++c) run(static_cast<std::size_t>(c));
  } else {
    for (long c = 0; c < nc; ++c) run(static_cast<std::size_t>(c));
  }
  double a = 0, b = 0;
  for (std::size_t c = 0; c < nchunks; ++c) {
    a += sum[c];
    b += sum2[c];
  }
  const double ns = static_cast<double>(samples);
  const double mean = a / ns;
  const double var = std::max(0.0, b / ns - mean * mean);
  RelaxationRate r;
  r.samples = samples;
  r.numerator = mean;
  r.denominator = relaxation_denominator(beta, mu);
  r.rel_error = std::sqrt(var / ns) / mean;
  r.gamma = mean / r.denominator * kp.geom.omega;
  r.tau = 1 / r.gamma;
  if (!(r.rel_error <= max_rel_error))
    throw std::runtime_error("relaxation_rate: Monte Carlo error " + std::to_string(r.rel_error) + " above budget");
  return r;
}

ShellKernel shell_grid(const KineticParams& kp) {
  if (kp.shells < 8) throw std::invalid_argument("shell_grid: need at least 8 shells");
  const double ef = std::sqrt(2 * kp.n);
  const double t = kp.t_over_tf * ef;
  double mu, emax;
  auto occ = [&](double e) {
    if (t == 0) return e < mu ? 1.0 : 0.0;
    const double x = (e - mu) / t;
    return x > 700 ? 0.0 : 1 / (std::exp(x) + 1);
  };
  if (t > 0) {
    mu = semiclassical_mu(kp.n, t);
    emax = std::max(0.0, mu + t * std::log(1 / 1e-3 - 1));
  } else {
    mu = ef;
    emax = ef;
  }
  ShellKernel k;
  const int S = kp.shells;
  const double w = emax / S;
  k.energy.resize(S);
  k.weight.resize(S);
  for (int a = 0; a < S; ++a) {
    k.energy[a] = (a + 0.5) * w;
    // density of states E times occupation, midpoint rule inside the shell
    double acc = 0;
    constexpr int sub = 64;
    for (int j = 0; j < sub; ++j) {
      const double e = (a + (j + 0.5) / sub) * w;
      acc += e * occ(e);
    }
    k.weight[a] = acc;
  }
  k.weight /= k.weight.sum();
  k.vz = Eigen::MatrixXd::Zero(S, S);
  k.vperp = Eigen::MatrixXd::Zero(S, S);
  return k;
}

ShellKernel shell_kernel(const KineticParams& kp, const CouplingMatrix& cm) {
  ShellKernel k = shell_grid(kp);
  const int S = kp.shells;
  const double w = k.energy[0] * 2;
  std::vector<int> shell(cm.n());
  for (std::size_t i = 0; i < cm.n(); ++i) shell[i] = std::min(S - 1, static_cast<int>(cm.modes.modes[i].energy() / w));
  Eigen::MatrixXd sz = Eigen::MatrixXd::Zero(S, S), sp = sz, cnt = sz;
  for (std::size_t i = 0; i < cm.n(); ++i)
    for (std::size_t j = 0; j < cm.n(); ++j) {
      if (i == j) continue;
      sz(shell[i], shell[j]) += cm.jz(i, j);
      sp(shell[i], shell[j]) += cm.jperp(i, j);
      cnt(shell[i], shell[j]) += 1;
    }
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b) {
      if (cnt(a, b) == 0) continue;
      const double nb = std::max(0.0, kp.n * k.weight[b] - (a == b ? 1.0 : 0.0));
      k.vz(a, b) = nb * sz(a, b) / cnt(a, b);
      k.vperp(a, b) = nb * sp(a, b) / cnt(a, b);
    }
  return k;
}

KineticSeries evolve_kinetic(const KineticParams& kp, const ShellKernel& k, const KineticConfig& cfg) {
  const auto S = k.energy.size();
  if (k.weight.size() != S || k.vz.rows() != S || k.vperp.rows() != S)
    throw std::invalid_argument("evolve_kinetic: inconsistent shell kernel");
  if (kp.gamma < 0) throw std::invalid_argument("evolve_kinetic: negative relaxation rate");
  const Eigen::VectorXd delta = kp.geom.delta_omega * kp.geom.omega / (2 * pi) * k.energy;  // Hz
  const double fmax = 2 * pi * (delta.cwiseAbs() + k.vz.cwiseAbs().cwiseMax(k.vperp.cwiseAbs()).rowwise().sum() * 0.5)
                                   .maxCoeff() + kp.gamma;
  const double rec = cfg.record_dt;
  if (!(rec > 0 && cfg.t_max >= 0)) throw std::invalid_argument("evolve_kinetic: bad time grid");
  const double base = cfg.dt > 0 ? cfg.dt : (fmax > 0 ? 0.05 / fmax : rec);
  const auto per = static_cast<long>(std::ceil(rec / base - 1e-9));
  const double dt = rec / static_cast<double>(per);
  const auto nrec = static_cast<long>(std::llround(cfg.t_max / rec));

  using M3 = Eigen::Matrix<double, 3, Eigen::Dynamic>;
  M3 s(3, S);
  s.setZero();
  s.row(0).setConstant(0.5);
  auto rhs = [&](const M3& x) {
    const Eigen::Vector3d bar = x * k.weight;
    M3 d(3, S);
    const Eigen::VectorXd bx = k.vperp * x.row(0).transpose(), by = k.vperp * x.row(1).transpose();
    const Eigen::VectorXd bz = k.vz * x.row(2).transpose() + delta;
    for (Eigen::Index a = 0; a < S; ++a) {
      const Eigen::Vector3d b(bx[a], by[a], bz[a]);
      d.col(a) = 2 * pi * b.cross(x.col(a)) - kp.gamma * (x.col(a) - bar);
    }
    return d;
  };
  KineticSeries out;
  out.shell_sx.resize(S, nrec + 1);
  auto record = [&](long r) {
    const Eigen::Vector3d bar = s * k.weight;
    out.times.push_back(r * rec);
    out.sbar.push_back(bar);
    out.shell_sx.col(r) = s.row(0).transpose();
  };
  record(0);
  for (long r = 1; r <= nrec; ++r) {
    for (long st = 0; st < per; ++st) {
      const M3 k1 = rhs(s);
      const M3 k2 = rhs(s + 0.5 * dt * k1);
      const M3 k3 = rhs(s + 0.5 * dt * k2);
      const M3 k4 = rhs(s + dt * k3);
      s += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    record(r);
  }
  const double n0 = out.sbar.front().norm();
  for (const auto& v : out.sbar) out.sbar_norm.push_back(n0 > 0 ? v.norm() / n0 : 0.0);
  return out;
}

double decay_time(const KineticSeries& s) {
  const double th = std::exp(-1.0);
  for (std::size_t i = 1; i < s.sbar_norm.size(); ++i)
    if (s.sbar_norm[i] < th) {
      const double a = s.sbar_norm[i - 1], b = s.sbar_norm[i];
      return s.times[i - 1] + (a - th) / (a - b) * (s.times[i] - s.times[i - 1]);
    }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace molspin

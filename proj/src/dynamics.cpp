#include "molspin/dynamics.hpp"

#include "molspin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace molspin {

using std::numbers::pi;
using Eigen::MatrixXd;

void SpinEnsemble::rotate(const Eigen::Matrix3d& r) {
  const MatrixXd x = sx, y = sy, z = sz;
  sx = r(0, 0) * x + r(0, 1) * y + r(0, 2) * z;
  sy = r(1, 0) * x + r(1, 1) * y + r(1, 2) * z;
  sz = r(2, 0) * x + r(2, 1) * y + r(2, 2) * z;
}

namespace {

// Orthonormal pair completing dir.
std::pair<Eigen::Vector3d, Eigen::Vector3d> transverse(const Eigen::Vector3d& dir) {
  const Eigen::Vector3d helper = std::abs(dir.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d a = dir.cross(helper).normalized();
  const Eigen::Vector3d b = dir.cross(a);
  return {a, b};
}

void check_dir(const Eigen::Vector3d& d) {
  if (std::abs(d.norm() - 1) > 1e-12) throw std::invalid_argument("spin direction must be a unit vector");
}

}  // namespace

SpinEnsemble dtwa_initial(const Eigen::Vector3d& dir, std::size_t n, std::size_t trajectories, std::uint64_t seed,
                          std::uint64_t first_index) {
  check_dir(dir);
  const auto [a, b] = transverse(dir);
  SpinEnsemble e;
  const auto N = static_cast<Eigen::Index>(n), T = static_cast<Eigen::Index>(trajectories);
  e.sx.resize(N, T);
  e.sy.resize(N, T);
  e.sz.resize(N, T);
  for (Eigen::Index k = 0; k < T; ++k) {
    auto g = make_stream(seed, first_index + static_cast<std::uint64_t>(k));
    for (Eigen::Index i = 0; i < N; ++i) {
      const std::uint64_t bits = g();
      const double pa = (bits & 1) ? 0.5 : -0.5, pb = (bits & 2) ? 0.5 : -0.5;
      const Eigen::Vector3d s = 0.5 * dir + pa * a + pb * b;
      e.sx(i, k) = s.x();
      e.sy(i, k) = s.y();
      e.sz(i, k) = s.z();
    }
  }
  return e;
}

SpinEnsemble mean_field_initial(const Eigen::Vector3d& dir, std::size_t n) {
  check_dir(dir);
  SpinEnsemble e;
  const auto N = static_cast<Eigen::Index>(n);
  e.sx = MatrixXd::Constant(N, 1, 0.5 * dir.x());
  e.sy = MatrixXd::Constant(N, 1, 0.5 * dir.y());
  e.sz = MatrixXd::Constant(N, 1, 0.5 * dir.z());
  return e;
}

Eigen::Matrix3d rotation_x(double t) { return Eigen::AngleAxisd(t, Eigen::Vector3d::UnitX()).toRotationMatrix(); }
Eigen::Matrix3d rotation_y(double t) { return Eigen::AngleAxisd(t, Eigen::Vector3d::UnitY()).toRotationMatrix(); }
Eigen::Matrix3d rotation_z(double t) { return Eigen::AngleAxisd(t, Eigen::Vector3d::UnitZ()).toRotationMatrix(); }

SpinMoments ensemble_moments(const SpinEnsemble& e) {
  SpinMoments m;
  m.n = static_cast<double>(e.spins());
  const auto T = e.sx.cols();
  if (T == 0) return m;
  const Eigen::RowVectorXd X = e.sx.colwise().sum(), Y = e.sy.colwise().sum(), Z = e.sz.colwise().sum();
  m.mean = {X.mean(), Y.mean(), Z.mean()};
  for (Eigen::Index k = 0; k < T; ++k) {
    const Eigen::Vector3d d = Eigen::Vector3d(X[k], Y[k], Z[k]) - m.mean;
    m.cov += d * d.transpose();
  }
  m.cov /= static_cast<double>(T);
  return m;
}

double squeezing_xi2(const SpinMoments& m) {
  const double len = m.mean.norm();
  if (!(len >= 1e-6 * m.n) || len == 0) throw std::domain_error("squeezing: mean spin collapsed");
  const auto [a, b] = transverse(m.mean / len);
  Eigen::Matrix2d c;
  c << a.dot(m.cov * a), a.dot(m.cov * b), b.dot(m.cov * a), b.dot(m.cov * b);
  const double vmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(c, Eigen::EigenvaluesOnly).eigenvalues()[0];
  return m.n * vmin / (len * len);
}

double stable_dt(const CouplingMatrix& cm) {
  const Eigen::VectorXd rows = cm.jz.cwiseAbs().cwiseMax(cm.jperp.cwiseAbs()).rowwise().sum();
  double scale = rows.size() ? rows.maxCoeff() : 0.0;
  if (cm.n() > 0) scale = std::max(scale, (cm.hz + cm.delta_e).cwiseAbs().maxCoeff());
  if (scale == 0) scale = 1.0;
  return 0.05 / (2 * pi * scale);
}

namespace {

struct Deriv {
  MatrixXd x, y, z;
};

// Matrix form: one GEMM per component over a block of trajectories.
void rhs_block(const CouplingMatrix& cm, const Eigen::VectorXd& field, const Eigen::Ref<const MatrixXd>& sx,
               const Eigen::Ref<const MatrixXd>& sy, const Eigen::Ref<const MatrixXd>& sz, Deriv& d) {
  MatrixXd bx = cm.jperp * sx, by = cm.jperp * sy, bz = cm.jz * sz;
  bz.colwise() += field;
  const double w = 2 * pi;
  d.x = w * (by.cwiseProduct(sz) - bz.cwiseProduct(sy));
  d.y = w * (bz.cwiseProduct(sx) - bx.cwiseProduct(sz));
  d.z = w * (bx.cwiseProduct(sy) - by.cwiseProduct(sx));
}

// Loop form: the reference.
void rhs_loops(const CouplingMatrix& cm, const Eigen::VectorXd& field, const MatrixXd& sx, const MatrixXd& sy,
               const MatrixXd& sz, Deriv& d) {
  const auto N = sx.rows(), T = sx.cols();
  d.x.resize(N, T);
  d.y.resize(N, T);
  d.z.resize(N, T);
  for (Eigen::Index k = 0; k < T; ++k)
    for (Eigen::Index m = 0; m < N; ++m) {
      double bx = 0, by = 0, bz = field[m];
      for (Eigen::Index j = 0; j < N; ++j) {
        bx += cm.jperp(m, j) * sx(j, k);
        by += cm.jperp(m, j) * sy(j, k);
        bz += cm.jz(m, j) * sz(j, k);
      }
      d.x(m, k) = 2 * pi * (by * sz(m, k) - bz * sy(m, k));
      d.y(m, k) = 2 * pi * (bz * sx(m, k) - bx * sz(m, k));
      d.z(m, k) = 2 * pi * (bx * sy(m, k) - by * sx(m, k));
    }
}

template <class Rhs>
void rk4_step(MatrixXd& sx, MatrixXd& sy, MatrixXd& sz, double dt, Rhs&& f) {
  Deriv k1, k2, k3, k4;
  f(sx, sy, sz, k1);
  f(sx + 0.5 * dt * k1.x, sy + 0.5 * dt * k1.y, sz + 0.5 * dt * k1.z, k2);
  f(sx + 0.5 * dt * k2.x, sy + 0.5 * dt * k2.y, sz + 0.5 * dt * k2.z, k3);
  f(sx + dt * k3.x, sy + dt * k3.y, sz + dt * k3.z, k4);
  sx += dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
  sy += dt / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
  sz += dt / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z);
}

MatrixXd norms(const SpinEnsemble& e) {
  return e.sx.cwiseAbs2() + e.sy.cwiseAbs2() + e.sz.cwiseAbs2();
}

}  // namespace

void propagate(SpinEnsemble& e, const CouplingMatrix& cm, double duration, const StepControl& ctl,
               const std::function<void(double, const SpinEnsemble&)>& observer) {
  if (static_cast<std::size_t>(e.sx.rows()) != cm.n()) throw std::invalid_argument("propagate: ensemble/coupling size mismatch");
  if (duration < 0) throw std::invalid_argument("propagate: negative duration");
  const double base = ctl.dt > 0 ? ctl.dt : stable_dt(cm);
  const auto steps = static_cast<long>(std::ceil(duration / base - 1e-9));
  if (observer) observer(0.0, e);
  if (steps == 0) return;
  const double dt = duration / static_cast<double>(steps);
  const Eigen::VectorXd field = cm.hz + cm.delta_e;
  const MatrixXd n0 = norms(e);
  const auto T = e.sx.cols();
  const auto B = static_cast<Eigen::Index>(std::max<std::size_t>(1, ctl.block));
  const Eigen::Index nblocks = (T + B - 1) / B;

  for (long s = 0; s < steps; ++s) {
    if (ctl.exec == Exec::Serial) {
      rk4_step(e.sx, e.sy, e.sz, dt,
               [&](const MatrixXd& x, const MatrixXd& y, const MatrixXd& z, Deriv& d) { rhs_loops(cm, field, x, y, z, d); });
    } else {
#pragma omp parallel for schedule(static)
      for (Eigen::Index b = 0; b < nblocks; ++b) {
        const Eigen::Index c0 = b * B, w = std::min(B, T - c0);
        MatrixXd x = e.sx.middleCols(c0, w), y = e.sy.middleCols(c0, w), z = e.sz.middleCols(c0, w);
        rk4_step(x, y, z, dt, [&](const MatrixXd& a, const MatrixXd& bb, const MatrixXd& c, Deriv& d) {
          rhs_block(cm, field, a, bb, c, d);
        });
        e.sx.middleCols(c0, w) = x;
        e.sy.middleCols(c0, w) = y;
        e.sz.middleCols(c0, w) = z;
      }
    }
    if (observer) observer((s + 1) * dt, e);
  }
  const double drift = ((norms(e) - n0).cwiseAbs().array() / n0.array().max(1e-300)).maxCoeff();
  if (drift > ctl.norm_tol) throw std::runtime_error("propagate: spin length drifted by " + std::to_string(drift) +
                                                     ", reduce the time step");
}

Eigen::VectorXd classical_energy(const CouplingMatrix& cm, const SpinEnsemble& e) {
  const Eigen::VectorXd field = cm.hz + cm.delta_e;
  Eigen::VectorXd out(e.sx.cols());
  for (Eigen::Index k = 0; k < e.sx.cols(); ++k) {
    const auto x = e.sx.col(k), y = e.sy.col(k), z = e.sz.col(k);
    out[k] = 0.5 * (z.dot(cm.jz * z) + x.dot(cm.jperp * x) + y.dot(cm.jperp * y)) + field.dot(z);
  }
  return out;
}

double time_average(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size() || t.size() < 2) throw std::invalid_argument("time_average: need two samples");
  double s = 0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
  return s / (t.back() - t.front());
}

void finish_series(ObservableSeries& s) {
  s.contrast.clear();
  s.xi2.clear();
  if (s.moments.empty()) return;
  const double c0 = s.moments.front().mean.head<2>().norm();
  for (const auto& m : s.moments) {
    s.contrast.push_back(c0 > 0 ? m.mean.head<2>().norm() / c0 : 0.0);
    double x = std::numeric_limits<double>::quiet_NaN();
    // a single trajectory carries no fluctuations
    if (!m.cov.isZero(0)) {
      try {
        x = squeezing_xi2(m);
      } catch (const std::domain_error&) {
      }
    }
    s.xi2.push_back(x);
  }
}

namespace {

struct Recorder {
  std::vector<double> times;
  std::vector<Eigen::Vector3d> sum;
  std::vector<Eigen::Matrix3d> sum2;
  double count = 0;
};

// Runs cfg.trajectories (or one mean-field trajectory) through cm, starting at stream offset.
// Returns per-record means and covariances.
std::vector<SpinMoments> run_one(const CouplingMatrix& cm, const EvolveConfig& cfg, std::size_t trajectories,
                                 std::uint64_t offset, std::vector<double>& times) {
  if (!(cfg.t_max >= 0)) throw std::invalid_argument("evolve: t_max must be nonnegative");
  const double base = cfg.step.dt > 0 ? cfg.step.dt : stable_dt(cm);
  const double rec = cfg.record_dt > 0 ? cfg.record_dt : base;
  const auto nrec = static_cast<long>(std::llround(cfg.t_max / rec));
  const auto per = static_cast<long>(std::ceil(rec / base - 1e-9));
  StepControl ctl = cfg.step;
  ctl.dt = rec / static_cast<double>(per);

  const bool mf = cfg.mode == DynamicsMode::MeanField;
  const std::size_t total = mf ? 1 : trajectories;
  if (total == 0) throw std::invalid_argument("evolve: no trajectories");
  // chunk the ensemble so memory stays bounded for large runs
  const std::size_t chunk = std::max<std::size_t>(1, std::min<std::size_t>(total, 4'000'000 / std::max<std::size_t>(1, cm.n())));

  std::vector<Eigen::Vector3d> sum(nrec + 1, Eigen::Vector3d::Zero());
  std::vector<Eigen::Matrix3d> sum2(nrec + 1, Eigen::Matrix3d::Zero());
  auto accumulate = [&](long r, const SpinEnsemble& e) {
    const Eigen::RowVectorXd X = e.sx.colwise().sum(), Y = e.sy.colwise().sum(), Z = e.sz.colwise().sum();
    for (Eigen::Index k = 0; k < X.size(); ++k) {
      const Eigen::Vector3d v(X[k], Y[k], Z[k]);
      sum[r] += v;
      sum2[r] += v * v.transpose();
    }
  };
  for (std::size_t c0 = 0; c0 < total; c0 += chunk) {
    const std::size_t w = std::min(chunk, total - c0);
    SpinEnsemble e = mf ? mean_field_initial(cfg.direction, cm.n())
                        : dtwa_initial(cfg.direction, cm.n(), w, cfg.seed, offset + c0);
    accumulate(0, e);
    for (long r = 1; r <= nrec; ++r) {
      propagate(e, cm, rec, ctl);
      accumulate(r, e);
    }
  }
  times.resize(nrec + 1);
  std::vector<SpinMoments> out(nrec + 1);
  for (long r = 0; r <= nrec; ++r) {
    times[r] = r * rec;
    out[r].n = static_cast<double>(cm.n());
    out[r].mean = sum[r] / static_cast<double>(total);
    out[r].cov = sum2[r] / static_cast<double>(total) - out[r].mean * out[r].mean.transpose();
  }
  return out;
}

}  // namespace

ObservableSeries evolve(const CouplingMatrix& cm, const EvolveConfig& cfg) {
  ObservableSeries s;
  s.moments = run_one(cm, cfg, cfg.trajectories, 0, s.times);
  s.ntotal.assign(s.times.size(), static_cast<double>(cm.n()));
  finish_series(s);
  return s;
}

ObservableSeries evolve_thermal(const std::vector<CouplingMatrix>& configs, const EvolveConfig& cfg) {
  if (configs.empty()) throw std::invalid_argument("evolve_thermal: no configurations");
  const std::size_t per = std::max<std::size_t>(1, cfg.trajectories / configs.size());
  ObservableSeries s;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::vector<double> times;
    const auto m = run_one(configs[k], cfg, per, k * per, times);
    if (k == 0) {
      s.times = times;
      s.moments.assign(m.size(), SpinMoments{});
    }
    for (std::size_t r = 0; r < m.size(); ++r) {
      s.moments[r].mean += m[r].mean;
      s.moments[r].cov += m[r].cov;
      s.moments[r].n += m[r].n;
    }
  }
  const double K = static_cast<double>(configs.size());
  for (auto& m : s.moments) {
    m.mean /= K;
    m.cov /= K;
    m.n /= K;
  }
  s.ntotal.clear();
  for (const auto& m : s.moments) s.ntotal.push_back(m.n);
  finish_series(s);
  return s;
}

}  // namespace molspin

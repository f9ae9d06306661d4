#include "molspin/collective.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace molspin {

using std::numbers::pi;
using cd = std::complex<double>;

// S_x eigenbasis for one ladder, shared between states of the same size.
class DickeOperators {
 public:
  explicit DickeOperators(int n) : n_(n), d_(n + 1) {
    const double S = n / 2.0;
    m_.resize(d_);
    up_.resize(d_);  // up_[k]: <m_k + 1| S+ |m_k>, k >= 1
    for (int k = 0; k < d_; ++k) {
      m_[k] = S - k;
      up_[k] = k == 0 ? 0.0 : std::sqrt(S * (S + 1) - m_[k] * (m_[k] + 1));
    }
    Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(d_, d_);
    for (int k = 1; k < d_; ++k) jx(k - 1, k) = jx(k, k - 1) = 0.5 * up_[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jx);
    v_ = es.eigenvectors();
    // the spectrum is exactly -S..S
    lam_ = es.eigenvalues().unaryExpr([S](double x) { return std::round(x + S) - S; });
    const double ortho = (v_.transpose() * v_ - Eigen::MatrixXd::Identity(d_, d_)).cwiseAbs().maxCoeff();
    if (ortho > 1e-8) throw std::runtime_error("Dicke rotation basis lost orthogonality");
  }
  int dim() const { return d_; }
  const Eigen::VectorXd& m() const { return m_; }
  const Eigen::VectorXd& up() const { return up_; }

  void rotate_x(Eigen::VectorXcd& psi, double angle) const {
    Eigen::VectorXcd c = v_.transpose() * psi;
    for (int k = 0; k < d_; ++k) c[k] *= std::polar(1.0, -angle * lam_[k]);
    psi = v_ * c;
  }
  void rotate_z(Eigen::VectorXcd& psi, double angle) const {
    for (int k = 0; k < d_; ++k) psi[k] *= std::polar(1.0, -angle * m_[k]);
  }
  // S+ psi, S- psi
  Eigen::VectorXcd raise(const Eigen::VectorXcd& psi) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d_);
    for (int k = 1; k < d_; ++k) out[k - 1] = up_[k] * psi[k];
    return out;
  }
  Eigen::VectorXcd lower(const Eigen::VectorXcd& psi) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d_);
    for (int k = 1; k < d_; ++k) out[k] = up_[k] * psi[k - 1];
    return out;
  }

 private:
  int n_, d_;
  Eigen::VectorXd m_, up_, lam_;
  Eigen::MatrixXd v_;
};

namespace {

std::shared_ptr<const DickeOperators> operators(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const DickeOperators>> cache;
  std::lock_guard lock(mu);
  auto& p = cache[n];
  if (!p) p = std::make_shared<const DickeOperators>(n);
  return p;
}

double log_binom(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

}  // namespace

CollectiveState CollectiveState::css_x(int n) {
  if (n < 1 || n > 20000) throw std::invalid_argument("css_x: particle number out of range");
  CollectiveState s;
  s.n_ = n;
  s.ops_ = operators(n);
  s.psi_.resize(n + 1);
  for (int k = 0; k <= n; ++k) s.psi_[k] = std::exp(0.5 * log_binom(n, k) - n / 2.0 * std::log(2.0));
  return s;
}

void CollectiveState::twist(double chi, double t) {
  const auto& m = ops_->m();
  for (int k = 0; k <= n_; ++k) psi_[k] *= std::polar(1.0, -2 * pi * chi * t * m[k] * m[k]);
}

void CollectiveState::precess(double h, double t) { ops_->rotate_z(psi_, 2 * pi * h * t); }
void CollectiveState::rotate_x(double a) { ops_->rotate_x(psi_, a); }
void CollectiveState::rotate_z(double a) { ops_->rotate_z(psi_, a); }
void CollectiveState::rotate_y(double a) {
  // S_y = R_z(pi/2) S_x R_z(-pi/2)
  ops_->rotate_z(psi_, -pi / 2);
  ops_->rotate_x(psi_, a);
  ops_->rotate_z(psi_, pi / 2);
}

SpinMoments CollectiveState::moments() const {
  const Eigen::VectorXcd up = ops_->raise(psi_), dn = ops_->lower(psi_);
  const Eigen::VectorXcd x = 0.5 * (up + dn), y = cd(0, -0.5) * (up - dn);
  const Eigen::VectorXcd z = ops_->m().cast<cd>().cwiseProduct(psi_);
  const Eigen::VectorXcd* v[3] = {&x, &y, &z};
  SpinMoments mo;
  mo.n = n_;
  for (int a = 0; a < 3; ++a) mo.mean[a] = psi_.dot(*v[a]).real();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) mo.cov(a, b) = v[a]->dot(*v[b]).real() - mo.mean[a] * mo.mean[b];
  return mo;
}

double SphereGrid::integral() const {
  const double dphi = 2 * pi / static_cast<double>(phi.size());
  return theta_weight.dot(q.rowwise().sum()) * dphi;
}

SphereGrid husimi_grid(const CollectiveState& s, int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("husimi_grid: grid too small");
  const int n = s.n();
  SphereGrid g;
  auto* ws = gsl_integration_fixed_alloc(gsl_integration_fixed_legendre, n_theta, -1.0, 1.0, 0.0, 0.0);
  const double* x = gsl_integration_fixed_nodes(ws);
  const double* w = gsl_integration_fixed_weights(ws);
  g.theta.resize(n_theta);
  g.theta_weight.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    g.theta[i] = std::acos(x[n_theta - 1 - i]);
    g.theta_weight[i] = w[n_theta - 1 - i];
  }
  gsl_integration_fixed_free(ws);
  g.phi = Eigen::VectorXd::LinSpaced(n_phi, 0, 2 * pi * (n_phi - 1.0) / n_phi);
  g.q.resize(n_theta, n_phi);
  const auto& psi = s.amplitudes();
  for (int i = 0; i < n_theta; ++i) {
    const double c = std::cos(g.theta[i] / 2), sn = std::sin(g.theta[i] / 2);
    Eigen::VectorXd mag(n + 1);
    for (int k = 0; k <= n; ++k)
      mag[k] = std::exp(0.5 * log_binom(n, k)) * std::pow(c, n - k) * std::pow(sn, k);
    for (int j = 0; j < n_phi; ++j) {
      cd amp = 0;
      for (int k = 0; k <= n; ++k) amp += mag[k] * std::polar(1.0, -k * g.phi[j]) * psi[k];
      g.q(i, j) = (n + 1) / (4 * pi) * std::norm(amp);
    }
  }
  return g;
}

}  // namespace molspin

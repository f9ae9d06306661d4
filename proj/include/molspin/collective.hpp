#pragma once
// Exact dynamics in the symmetric (Dicke) sector, S = N/2, basis |S, m> with m = S, S-1, ..., -S.

#include "molspin/dynamics.hpp"

#include <Eigen/Dense>

#include <complex>
#include <memory>

namespace molspin {

class DickeOperators;

class CollectiveState {
 public:
  // Coherent state along +x.
  static CollectiveState css_x(int n);

  int n() const { return n_; }
  const Eigen::VectorXcd& amplitudes() const { return psi_; }

  // exp(-i 2 pi chi t S_z^2), chi in Hz.
  void twist(double chi, double t);
  // exp(-i 2 pi h t S_z)
  void precess(double h, double t);
  // exp(-i angle S_axis)
  void rotate_x(double angle);
  void rotate_y(double angle);
  void rotate_z(double angle);

  SpinMoments moments() const;
  double xi2() const { return squeezing_xi2(moments()); }
  double fidelity(const CollectiveState& o) const { return std::norm(o.psi_.dot(psi_)); }

 private:
  int n_ = 0;
  Eigen::VectorXcd psi_;
  std::shared_ptr<const DickeOperators> ops_;
};

// Husimi Q on a (theta, phi) grid: Q = (N+1)/(4 pi) |<theta, phi|psi>|^2, normalized over the sphere.
struct SphereGrid {
  Eigen::VectorXd theta, phi, theta_weight;  // Gauss-Legendre in cos(theta)
  Eigen::MatrixXd q;                          // theta x phi
  double integral() const;
};
SphereGrid husimi_grid(const CollectiveState& s, int n_theta, int n_phi);

}  // namespace molspin

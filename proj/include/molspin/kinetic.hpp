#pragma once
// Energy-shell kinetic model of spin self-rephasing and the collisional relaxation rate of a
// quasi-2D Fermi gas (linearized Boltzmann equation, relaxation-time approximation).

#include "molspin/exec.hpp"
#include "molspin/spinmodel.hpp"
#include "molspin/units.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace molspin {

// m_r d^2 mu_ud^2 / (12 pi eps0 hbar^2) written as (mu_ud d)^2 M / (8 pi eps0 hbar^2).
double dipole_length(const TrapGeometry& geom, double mu_ud = 1 / std::sqrt(3.0));
// sqrt(sigma_dd / 4 pi) with sigma_dd = 32 pi a_dd^2 / 15
double a3d_from_dipole_length(double a_dd);
// a_z sqrt(pi / B) exp(-sqrt(pi/2) a_z / a_3d), B = 0.905
double a2d_from_geometry(const TrapGeometry& geom, double a_3d);
// hbar^2 / (M a_2d^2) in units of hbar*omega
double bound_state_energy(const TrapGeometry& geom, double a_2d);

struct KineticParams {
  TrapGeometry geom;
  double n = 1000;
  double t_over_tf = 1.0;
  double gamma = 0;  // 1/s
  int shells = 32;
  double a_3d = 0;   // m; 0 derives it from the dipole length
};

// Semiclassical chemical potential (hbar*omega units): N = -(T)^2 Li2(-z).
double semiclassical_mu(double n, double temperature);

// \int d^2p/(2pi)^2 d^2r p_x^2 f0 (1 - f0) = -Li2(-z) / beta^3 with m = omega = hbar = 1.
double relaxation_denominator(double beta, double mu);

struct RelaxationRate {
  double gamma = 0;   // 1/s
  double tau = 0;     // s
  double rel_error = 0;
  double numerator = 0, denominator = 0;
  std::size_t samples = 0;
};

// Monte Carlo numerator over (r, P, p_r, theta') with Gaussian importance sampling. Throws
// std::runtime_error when the relative standard error exceeds max_rel_error.
RelaxationRate relaxation_rate(const KineticParams& kp, std::size_t samples = 1 << 20, std::uint64_t seed = 0,
                               Exec exec = Exec::Parallel, double max_rel_error = 0.05);

struct ShellKernel {
  Eigen::VectorXd energy, weight;   // shell centers (hbar*omega), weights summing to 1
  Eigen::MatrixXd vz, vperp;        // Hz; field on shell a is sum_b v_ab S_b
};

// Shells linear in E up to where the occupation falls below 1e-3; no interactions.
ShellKernel shell_grid(const KineticParams& kp);
// Adds interactions: couplings averaged over mode pairs falling in each shell pair, scaled by the
// number of particles in the source shell. Modes of cm are taken as occupied.
ShellKernel shell_kernel(const KineticParams& kp, const CouplingMatrix& cm);

struct KineticConfig {
  double t_max = 0.02;
  double record_dt = 1e-4;
  double dt = 0;  // 0: 0.05 / fastest frequency
};

struct KineticSeries {
  std::vector<double> times;
  std::vector<Eigen::Vector3d> sbar;
  std::vector<double> sbar_norm;  // |Sbar| / |Sbar(0)|
  Eigen::MatrixXd shell_sx;       // shells x times
};

KineticSeries evolve_kinetic(const KineticParams& kp, const ShellKernel& k, const KineticConfig& cfg);

// First time |Sbar| / |Sbar(0)| crosses 1/e by linear interpolation; NaN when it never does.
double decay_time(const KineticSeries& s);

}  // namespace molspin

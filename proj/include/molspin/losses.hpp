#pragma once
// s-wave collisional loss between molecules in different internal states, in the mean-field
// decoupled equations for spins s_m and mode densities rho_m.

#include "molspin/dynamics.hpp"
#include "molspin/units.hpp"

#include <Eigen/Dense>

namespace molspin {

struct LossTable {
  Eigen::MatrixXd gamma;  // 1/s, symmetric, diagonal included
  double a_sc = 0;        // m
};

// \int phi_a(x)^2 phi_b(x)^2 dx for unit oscillator length, exact Gauss-Hermite.
double overlap_1d(int a, int b);

LossTable build_loss_table(const ModeSet& ms, const TrapGeometry& geom, double a_sc = krb::a_sc_bohr * si::bohr);

struct LossConfig {
  double t_max = 0;
  double record_dt = 0;
  double dt = 0;  // 0 picks stable_dt of the couplings, capped by the fastest loss rate
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
  double rho_tol = 1e-6;
};

struct LossState {
  Eigen::VectorXd sx, sy, sz, rho;
};

// d/dt of (s, rho): Hamiltonian precession with hz re-weighted by rho, plus the loss terms.
LossState loss_rhs(const CouplingMatrix& cm, const LossTable& lt, const LossState& s);

// One mean-field trajectory from s_m = rho_m dir / 2 with rho from the mode occupancy.
ObservableSeries evolve_with_losses(const CouplingMatrix& cm, const LossTable& lt, const LossConfig& cfg);

}  // namespace molspin

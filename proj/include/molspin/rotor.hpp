#pragma once
// Rigid rotor in a DC field along Z. Energies in B, fields in B/d, dipoles in d.

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <vector>

namespace molspin {

struct RotorParams {
  double field = 0.0;  // B/d
  int n_max = 10;
};

struct RotorState {
  int n = 0;
  int nz = 0;
  auto operator<=>(const RotorState&) const = default;
};

struct StarkSolution {
  double field = 0.0;
  int n_max = 0;
  // blocks[|nz|]: columns are dressed states in ascending energy, rows the N = |nz|..n_max basis.
  std::vector<Eigen::MatrixXd> vectors;
  std::vector<Eigen::VectorXd> values;

  double energy(RotorState s) const;
  // coefficient vector over N = |nz|..n_max
  Eigen::VectorXd state(RotorState s) const;
};

enum class Basis { I, II };

struct DipoleMoments {
  double mu_down = 0, mu_up = 0, mu_ud = 0, mu_du = 0;
  Basis basis = Basis::II;
};

struct CouplingScalars {
  double eta = 0, nu = 0, zeta = 0, mu_of_E = 0;
};

StarkSolution stark_solve(const RotorParams& p);

// <N',M'| C^1_q |N,M>; C^1_0 = cos(theta)
double rotor_dipole_element(int n1, int m1, int q, int n2, int m2);
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

// Down is dressed |0,0>; up is |1,1> (BasisI) or |1,0> (BasisII).
DipoleMoments dipole_moments(const StarkSolution& sol, Basis basis);
CouplingScalars coupling_scalars(const DipoleMoments& dm);

// d(e_a - e_b)/dE by central difference (B per B/d).
double transition_slope(double field, RotorState a, RotorState b, int n_max = 10, double step = 1e-4);
// Same slope converted to Hz per V/cm with KRb constants.
double transition_slope_hz_per_v_cm(double field_v_per_cm, RotorState a, RotorState b, int n_max = 10);

// Max change of the tracked energies (n <= 2) between n_max and 2*n_max.
double truncation_error(double field, int n_max);

}  // namespace molspin

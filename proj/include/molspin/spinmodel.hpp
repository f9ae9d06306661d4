#pragma once
// Long-range XXZ model on oscillator modes:
//   H = 1/2 sum_ij [Jz_ij s^z_i s^z_j + Jperp_ij (s^x_i s^x_j + s^y_i s^y_j)] + sum_i (hz_i + dE_i) s^z_i
// Couplings in Hz (cyclic).

#include "molspin/hobasis.hpp"
#include "molspin/rotor.hpp"
#include "molspin/units.hpp"

#include <Eigen/Dense>

#include <vector>

namespace molspin {

struct CouplingMatrix {
  Eigen::MatrixXd jz, jperp;
  Eigen::VectorXd hz, delta_e;
  // hz = hz_pair * density; kept so lossy runs can re-weight it
  Eigen::MatrixXd hz_pair;
  ModeSet modes;
  std::size_t n() const { return modes.size(); }
};

struct CollectiveParams {
  double jbar_perp = 0, jbar_z = 0, chi = 0, hbar_z = 0;
  std::size_t n = 0;
  // Coefficient of S_z^2 for the same couplings made uniform: H = 1/2 sum_{i != j} J s_i s_j.
  double oat_rate() const { return n > 1 ? 0.5 * chi * n / (n - 1.0) : 0.0; }
};

// hz is weighted by the table's occupancy.
CouplingMatrix build_couplings(const InteractionTable& table, const DipoleMoments& dm, const TrapGeometry& geom);

// The eta/nu/zeta form of the main text, for comparison only. The two forms share chi; see tests.
CouplingMatrix build_couplings_eta_form(const InteractionTable& table, const DipoleMoments& dm,
                                        const TrapGeometry& geom);

CollectiveParams collective_reduce(const CouplingMatrix& cm);

// chi predicted from the averaged Fock/Hartree elements, mu(E) (<F> - <H>), in Hz.
double chi_from_table(const InteractionTable& table, const DipoleMoments& dm, const TrapGeometry& geom);

// Keep rows/cols listed in idx; occupancy is copied.
InteractionTable subset(const InteractionTable& t, const std::vector<std::size_t>& idx);

// Unit-filled nx x ny square array: all N(N-1)/2 pair values 1/R^3 normalized to their mean.
std::vector<double> lattice_couplings(int nx, int ny, double spacing = 1.0);

// Upper-triangle pair values of (Fock - Hartree), the combination that sets chi.
std::vector<double> trap_couplings(const InteractionTable& t);

struct HistogramBin {
  double center = 0;
  std::size_t positive = 0, negative = 0;
};
// Log-spaced bins of |value| / mean(|value|); the sign goes to separate counters.
std::vector<HistogramBin> coupling_histogram(const std::vector<double>& values, int bins);

double coefficient_of_variation(const std::vector<double>& v);

}  // namespace molspin

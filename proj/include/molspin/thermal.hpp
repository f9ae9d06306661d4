#pragma once
// Grand-canonical Fermi-Dirac occupation of the 2D oscillator modes. Energies in hbar*omega
// above the zero point.

#include "molspin/hobasis.hpp"

#include <cstdint>
#include <vector>

namespace molspin {

struct ThermalState {
  double n_target = 0;
  double t_over_tf = 0;
  double mu_chem = 0;
  double fermi_energy = 0;  // sqrt(2 n_target)
  double temperature() const { return t_over_tf * fermi_energy; }
};

// Smallest shell cutoff with occupation of the top shell below 1e-4 (or the filled Fermi sea at T = 0).
int thermal_pool_emax(double n_target, double t_over_tf);

// Solves sum_pool n_F = n_target by bisection. Throws when the pool is too small.
ThermalState solve_thermal(double n_target, double t_over_tf, const ModeSet& pool);

double fermi_occupation(const ThermalState& th, double energy);

// Pool with occupancy set to n_F.
ModeSet thermal_occupancy(const ThermalState& th, const ModeSet& pool);

// Indices into pool of occupied modes. T = 0 fills the lowest n_target modes in pool order.
std::vector<std::size_t> sample_modes(const ThermalState& th, const ModeSet& pool, std::uint64_t seed,
                                      std::uint64_t stream = 0);

}  // namespace molspin

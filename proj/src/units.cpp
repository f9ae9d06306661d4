#include "molspin/units.hpp"

#include <cmath>
#include <stdexcept>

namespace molspin {

double TrapGeometry::a_perp() const { return std::sqrt(si::hbar / (mass * omega)); }
double TrapGeometry::a_z() const { return std::sqrt(si::hbar / (mass * omega_z)); }
double TrapGeometry::c1() const { return std::sqrt(omega / omega_z); }

double TrapGeometry::energy_unit_hz() const {
  const double a = a_perp();
  return dipole * dipole / (si::eps0 * a * a * a) / si::h;
}

void TrapGeometry::validate() const {
  if (!(omega > 0) || !(omega_z > 0) || !(mass > 0) || !(dipole > 0))
    throw std::invalid_argument("trap geometry: frequencies, mass and dipole must be positive");
  if (omega_z < 10 * omega)
    throw std::invalid_argument("trap geometry: omega_z/omega < 10 is not quasi-2D");
  if (delta_omega < 0 || delta_omega > 1)
    throw std::invalid_argument("trap geometry: delta_omega outside [0,1]");
}

}  // namespace molspin

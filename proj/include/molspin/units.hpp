#pragma once
// Physical constants, KRb defaults and the trap geometry that anchors the unit system.
//
// Lengths are measured in a_perp, interaction energies in d^2/(eps0 a_perp^3) and
// spin-model couplings in Hz (cyclic; equations of motion multiply by 2*pi).

#include <numbers>

namespace molspin {

namespace si {
inline constexpr double h = 6.62607015e-34;
inline constexpr double hbar = h / (2 * std::numbers::pi);
inline constexpr double amu = 1.66053906660e-27;
inline constexpr double debye = 3.33564095198e-30;
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double bohr = 5.29177210903e-11;
inline constexpr double kB = 1.380649e-23;
}  // namespace si

namespace krb {
inline constexpr double mass_amu = 127.0;
inline constexpr double dipole_debye = 0.566;
inline constexpr double rot_const_hz = 1.114e9;
inline constexpr double field_unit_v_per_cm = 3.9e3;  // B/d
inline constexpr double omega = 2 * std::numbers::pi * 50.0;
inline constexpr double omega_z = 2 * std::numbers::pi * 20.0e3;
inline constexpr double a_sc_bohr = 118.0;
}  // namespace krb

struct TrapGeometry {
  double omega = krb::omega;      // rad/s
  double omega_z = krb::omega_z;  // rad/s
  double delta_omega = 0.0;       // (w1 - w0) / mean
  double mass = krb::mass_amu * si::amu;
  double dipole = krb::dipole_debye * si::debye;

  double a_perp() const;
  double a_z() const;
  double c1() const;  // a_z / a_perp
  // Hz per unit of d^2/(eps0 a_perp^3).
  double energy_unit_hz() const;
  // throws std::invalid_argument when the quasi-2D invariants are violated
  void validate() const;
};

}  // namespace molspin

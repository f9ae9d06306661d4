#pragma once
// Dipolar kernels with dipoles along Z. Unit: d^2/eps0 over length^3, so the 1/(4 pi)
// of Coulomb's law is carried explicitly.

#include <array>

namespace molspin {

// (1 - 3 cos^2 theta) / (4 pi R^3)
double vdd_3d(const std::array<double, 3>& r);

// Gaussian-averaged over the axial ground state of width a_z. Log-divergent at r = 0.
double vdd_2d_real(double r, double a_z);

// Fourier transform (in-plane) of vdd_2d_real without its contact constant; this is the
// kernel used for matrix elements. Tends to -(1/3)sqrt(2/pi)/(2 a_z) as q -> inf.
double vdd_2d_momentum(double q, double a_z);

// The expression as usually printed, without the exp(a_z^2 q^2 / 2) factor on the erfc term.
double vdd_2d_momentum_printed(double q, double a_z);

// Constant separating the transform of vdd_2d_real from vdd_2d_momentum: it is a pure
// contact term 1/(3 a_z sqrt(2 pi)) which cancels between Hartree and Fock elements.
double vdd_2d_contact(double a_z);

// Hankel transform of vdd_2d_real by quadrature, the oracle for the two forms above.
double vdd_2d_momentum_numeric(double q, double a_z);

// exp(x^2) erfc(x)
double erfcx(double x);

}  // namespace molspin

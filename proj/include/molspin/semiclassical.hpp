#pragma once
// Wigner-limit estimate of the direct interaction between two oscillator modes, used only to
// check the scaling of the exact elements.

#include <utility>
#include <vector>

namespace molspin {

// (16 (b^4 - b^2 + 1) E(b^2) - 8 (b^4 - 3 b^2 + 2) K(b^2)) / (15 pi b^2), parameter convention m = b^2.
double g_function(double b);

// Anisotropy factor for a = w_Z/w_X, b = w_Z/w_Y. Written with the Carlson integral
// G = (4 pi / 3)(1 - a b R_D(a^2, b^2, 1)), which equals the incomplete-elliptic form and has no
// removable singularities at a = 1 or b = 1.
double anisotropy_g_big(double a, double b);

// The same function through Legendre incomplete integrals; only valid for a, b in (0, 1).
double anisotropy_g_legendre(double a, double b);

struct SemiclassicalInput {
  double e1 = 1, e2 = 1;  // mode energies in hbar*omega_bar
  double anis_x = 1, anis_y = 1;
};

// Lengths in a_ho.
double vd_semiclassical(const SemiclassicalInput& in);

struct PowerFit {
  double exponent = 0, prefactor = 0, residual = 0;
};
// Least-squares slope of log|V| against log(index). Throws std::invalid_argument on fewer than
// 8 points, a zero value or a sign change inside the window.
PowerFit scaling_fit(const std::vector<std::pair<double, double>>& pts);

}  // namespace molspin

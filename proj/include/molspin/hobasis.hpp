#pragma once
// Dipolar matrix elements between 2D oscillator modes.
//
// V_{ij}^{kl} = \int phi_i(r) phi_j(r') V(r - r') phi_k(r') phi_l(r), in units of d^2/(eps0 a_perp^3)
// with lengths in a_perp and c1 = a_z / a_perp. V_{ij}^{ji} is the density-density (Hartree)
// pairing, V_{ij}^{ij} the Fock pairing.

#include "molspin/exec.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace molspin {

struct Mode {
  int nx = 0, ny = 0;
  int energy() const { return nx + ny; }
  auto operator<=>(const Mode&) const = default;
};

struct ModeSet {
  std::vector<Mode> modes;
  std::vector<double> occupancy;

  std::size_t size() const { return modes.size(); }
  // First n modes in shell order (e = 0, 1, ...; nx descending within a shell), all occupied.
  static ModeSet shell_fill(std::size_t n);
  // Every mode with nx + ny <= e_max, occupancy zero.
  static ModeSet pool(int e_max);
  std::uint64_t digest() const;
};

// Coefficient of t^m in L_n^k(t).
mpq_class laguerre_coeff(int n, int k, int m);

// \int_0^{2pi} sin^n1 cos^n2
double angular_integral(int n1, int n2);

// J(n) = \int_0^inf q^{n+1} e^{-q^2/2} [A - c q e^{c^2 q^2/2} erfc(c q / sqrt 2)] dq, A = (2/3)sqrt(2/pi);
// the bracket is 2 c1 times the momentum kernel. Positive-term hypergeometric series in MPFR.
double radial_integral(int n, double c1);
std::string radial_integral_digits(int n, double c1, int bits, int digits);
// Independent evaluations of the same integral.
double radial_integral_quadrature(int n, double c1);
// The printed regularized-2F1 closed form (argument 1 - 1/c1^2), evaluated in MPFR.
double radial_integral_closed(int n, double c1, int bits = 256);

struct ElementValue {
  double value = 0.0;
  int bits = 0;           // precision at which two successive evaluations agreed
  double cancellation = 0.0;  // log10(max |term| / |sum|)
};

struct PrecisionPolicy {
  int start_bits = 128;
  int max_bits = 4096;
  double rel_tol = 1e-12;
};

// Quasi-closed sum, any four modes. Throws std::runtime_error when the precision cap is hit.
ElementValue matrix_element(Mode i, Mode j, Mode k, Mode l, double c1, const PrecisionPolicy& pol = {});
// Quasi-closed sum at one fixed precision (no adaptation).
ElementValue matrix_element_fixed(Mode i, Mode j, Mode k, Mode l, double c1, int bits);

inline ElementValue hartree_element(Mode i, Mode j, double c1, const PrecisionPolicy& pol = {}) {
  return matrix_element(i, j, j, i, c1, pol);
}
inline ElementValue fock_element(Mode i, Mode j, double c1, const PrecisionPolicy& pol = {}) {
  return matrix_element(i, j, i, j, c1, pol);
}

// Brute-force oracle: 1D Fourier transforms of wavefunction products by Gauss-Hermite
// quadrature, then an adaptive 2D momentum integral against the kernel (Parseval form of
// the 4D real-space integral). Independent of the Laguerre algebra above.
double matrix_element_quadrature(Mode i, Mode j, Mode k, Mode l, double c1);

// Double-precision fast path for many Hartree/Fock pairs: Talmi-Moshinsky brackets reduce each
// pair to relative-coordinate moments W(nx, ny) of the kernel, tabulated once per (max index, c1).
class PairTable {
 public:
  PairTable(int max_index, double c1);
  int max_index() const { return m_; }
  double c1() const { return c1_; }
  // {Hartree V_ij^ji, Fock V_ij^ij}
  std::pair<double, double> hartree_fock(Mode a, Mode b) const;

 private:
  int m_;
  double c1_;
  std::vector<double> w_;  // (2m+1)^2 kernel moments
  std::vector<double> d_;  // brackets, indexed [n1][n2][N]
  double bracket(int n1, int n2, int big) const;
};

// V_HO(i, j) = V_{(0,0)(i,j)}^{(i,j)(0,0)} - V_{(0,0)(i,j)}^{(0,0)(i,j)} along a cut.
double v_ho(const PairTable& t, Mode m);

struct InteractionTable {
  ModeSet modes;
  double c1 = 0.0;
  std::string method;     // "pair-table" or "quasi-closed"
  int precision_bits = 53;
  // Dense N x N, row-major. hartree = V_ij^ji, fock = V_ij^ij. Diagonals are zero.
  std::vector<double> hartree, fock;

  std::size_t n() const { return modes.size(); }
  double h(std::size_t i, std::size_t j) const { return hartree[i * n() + j]; }
  double f(std::size_t i, std::size_t j) const { return fock[i * n() + j]; }
};

enum class TableMethod { PairTable, QuasiClosed };

// Mode indices are capped at max_index per axis (pair-table memory grows as max_index^3).
InteractionTable build_interaction_table(const ModeSet& ms, double c1, TableMethod method = TableMethod::PairTable,
                                         Exec exec = Exec::Parallel, int max_index = 160);

// Cached build keyed by (mode digest, c1, method). Rebuilds on version or key mismatch.
InteractionTable cached_interaction_table(const ModeSet& ms, double c1, const std::string& cache_dir,
                                          TableMethod method = TableMethod::PairTable);
// Same, reusing a pair table built for a larger pool (thermal samples).
InteractionTable build_interaction_table(const ModeSet& ms, const PairTable& pt, Exec exec = Exec::Parallel);

void save_interaction_table(const InteractionTable& t, const std::string& path);
InteractionTable load_interaction_table(const std::string& path);

}  // namespace molspin

#pragma once
// Twist-untwist sensing: CSS(+x) -> twist(t, chi) -> R_x(-pi/2) R_z(phi) R_x(pi/2) -> untwist(t/2, -2 chi)
// -> read out S_y. The untwist runs on the other rotational basis, which flips and doubles chi.

#include "molspin/collective.hpp"
#include "molspin/dynamics.hpp"

#include <optional>
#include <string>

namespace molspin {

enum class Engine { IdealCollective, FullSpinModel };

struct FullModelSetup {
  CouplingMatrix twist;    // BasisI couplings
  CouplingMatrix untwist;  // BasisII couplings
  std::size_t trajectories = 2000;
  std::uint64_t seed = 0;
  StepControl step;
};

struct ProtocolConfig {
  int n = 100;
  double chi = 1.0;  // Hz, coefficient of S_z^2 (ideal engine)
  double t_twist = 0;
  double phi = 0;
  double detection_noise = 0;  // Delta S_z, spins
  Engine engine = Engine::IdealCollective;
  bool echo = true;
  std::optional<FullModelSetup> full;  // required for FullSpinModel
};

struct ProtocolResult {
  double mean_sy = 0, var_sy = 0;  // at the configured phi, without read noise
  double sigma_sy0 = 0;            // noiseless spread at phi = 0
  double slope = 0;                // d<S_y>/dphi at phi = 0
  double dphi = 0;
  double gain = 0;
  double gain_db() const { return 10 * std::log10(gain); }
};

ProtocolResult run_protocol(const ProtocolConfig& cfg);

// Same readout with a different Delta S_z, reusing the noiseless statistics.
ProtocolResult with_detection_noise(const ProtocolResult& r, int n, double noise);

// Final ideal state after the sequence (phi, echo as configured).
CollectiveState protocol_state(const ProtocolConfig& cfg, const std::string& stop_after = "");

// Exact OAT: time of minimal xi2 on a grid up to t_max and the value there.
struct OptimalSqueezing {
  double time = 0, xi2 = 1;
};
OptimalSqueezing optimal_oat(int n, double chi, double t_max, int points = 400);

// Delta E = dphi / (2 pi slope T_phase) sqrt(T_cycle); V/cm per sqrt(Hz).
double field_sensitivity(double dphi, double phase_time, double slope_hz_per_v_cm, double cycle_time = 0);
double dphi_from_gain_db(int n, double gain_db);

}  // namespace molspin

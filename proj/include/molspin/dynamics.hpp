#pragma once
// Classical spin dynamics for the XXZ model: DTWA ensembles and single mean-field trajectories.
// ds_m/dt = 2 pi B_m x s_m,  B_m = (sum_j Jperp_mj s^x_j, sum_j Jperp_mj s^y_j, sum_j Jz_mj s^z_j + hz_m + dE_m)

#include "molspin/exec.hpp"
#include "molspin/spinmodel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace molspin {

// N spins times T trajectories, one column per trajectory.
struct SpinEnsemble {
  Eigen::MatrixXd sx, sy, sz;
  std::size_t spins() const { return static_cast<std::size_t>(sx.rows()); }
  std::size_t trajectories() const { return static_cast<std::size_t>(sx.cols()); }
  // Apply the same rotation to every spin.
  void rotate(const Eigen::Matrix3d& r);
};

// Discrete Wigner sampling: the component along dir is +1/2, the two orthogonal ones are +-1/2.
// Trajectory k draws from stream (seed, first_index + k).
SpinEnsemble dtwa_initial(const Eigen::Vector3d& dir, std::size_t n, std::size_t trajectories, std::uint64_t seed,
                          std::uint64_t first_index = 0);
// One trajectory with every spin exactly dir/2.
SpinEnsemble mean_field_initial(const Eigen::Vector3d& dir, std::size_t n);

Eigen::Matrix3d rotation_x(double angle);
Eigen::Matrix3d rotation_y(double angle);
Eigen::Matrix3d rotation_z(double angle);

// Collective moments over trajectories: mean of S and the symmetrized covariance.
struct SpinMoments {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double n = 0;
};
SpinMoments ensemble_moments(const SpinEnsemble& e);

// N min_phi Var(S_perp) / |<S>|^2 from the 2x2 covariance transverse to the mean spin.
// Throws std::domain_error when |<S>| < 1e-6 N.
double squeezing_xi2(const SpinMoments& m);
inline double to_db(double xi2) { return -10.0 * std::log10(xi2); }

struct StepControl {
  double dt = 0;            // s; 0 picks stable_dt
  double norm_tol = 1e-6;   // relative |s|^2 drift allowed per spin
  Exec exec = Exec::Parallel;
  std::size_t block = 32;   // trajectories per work unit
};

// 0.05 / (2 pi max(|hz + dE|, max row sum of |J|)).
double stable_dt(const CouplingMatrix& cm);

// Advance by duration with fixed-step RK4 using n_steps = ceil(duration / dt). The observer, if
// set, sees the ensemble after each step (and once before the first).
void propagate(SpinEnsemble& e, const CouplingMatrix& cm, double duration, const StepControl& ctl,
               const std::function<void(double, const SpinEnsemble&)>& observer = {});

// Classical energy (Hz) of each trajectory.
Eigen::VectorXd classical_energy(const CouplingMatrix& cm, const SpinEnsemble& e);

enum class DynamicsMode { DTWA, MeanField };

struct EvolveConfig {
  double t_max = 0;
  double record_dt = 0;   // 0 records every step
  DynamicsMode mode = DynamicsMode::DTWA;
  std::size_t trajectories = 10000;
  std::uint64_t seed = 0;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
  StepControl step;
};

struct ObservableSeries {
  std::vector<double> times;
  std::vector<SpinMoments> moments;
  std::vector<double> ntotal;
  std::vector<double> contrast;  // |S_perp| / |S_perp(0)|
  std::vector<double> xi2;       // NaN where the contrast collapsed
};

ObservableSeries evolve(const CouplingMatrix& cm, const EvolveConfig& cfg);

// Several coupling matrices (thermal mode samples). Each configuration runs cfg.trajectories /
// configs.size() trajectories; means are averaged and covariances taken within configurations,
// so shot-to-shot particle-number noise does not enter the squeezing.
ObservableSeries evolve_thermal(const std::vector<CouplingMatrix>& configs, const EvolveConfig& cfg);

double time_average(const std::vector<double>& times, const std::vector<double>& v);

// Builds observables (contrast, xi2) from per-time moments.
void finish_series(ObservableSeries& s);

}  // namespace molspin

#include "molspin/metrology.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace molspin {

using std::numbers::pi;

namespace {

void twist_leg(CollectiveState& s, double chi, double t, bool echo) {
  if (echo) {
    s.twist(chi, t / 2);
    s.rotate_y(pi);
    s.twist(chi, t / 2);
  } else {
    s.twist(chi, t);
  }
}

struct Readout {
  double mean = 0, var = 0;
};

Readout ideal_readout(const ProtocolConfig& cfg, double phi) {
  ProtocolConfig c = cfg;
  c.phi = phi;
  const auto m = protocol_state(c).moments();
  return {m.mean.y(), m.cov(1, 1)};
}

void full_leg(SpinEnsemble& e, const CouplingMatrix& cm, double t, bool echo, const StepControl& ctl) {
  if (echo) {
    propagate(e, cm, t / 2, ctl);
    e.rotate(rotation_y(pi));
    propagate(e, cm, t / 2, ctl);
  } else {
    propagate(e, cm, t, ctl);
  }
}

// Runs the twist once and finishes the three phi values on copies of the twisted ensemble.
std::array<Readout, 3> full_readouts(const ProtocolConfig& cfg, const std::array<double, 3>& phis) {
  const auto& f = *cfg.full;
  if (f.twist.n() != f.untwist.n()) throw std::invalid_argument("run_protocol: coupling sizes differ");
  SpinEnsemble e = dtwa_initial(Eigen::Vector3d::UnitX(), f.twist.n(), f.trajectories, f.seed);
  full_leg(e, f.twist, cfg.t_twist, cfg.echo, f.step);
  std::array<Readout, 3> out;
  for (int k = 0; k < 3; ++k) {
    SpinEnsemble x = e;
    x.rotate(rotation_x(-pi / 2) * rotation_z(phis[k]) * rotation_x(pi / 2));
    full_leg(x, f.untwist, cfg.t_twist / 2, cfg.echo, f.step);
    const auto m = ensemble_moments(x);
    out[k] = {m.mean.y(), m.cov(1, 1)};
  }
  return out;
}

}  // namespace

CollectiveState protocol_state(const ProtocolConfig& cfg, const std::string& stop_after) {
  auto s = CollectiveState::css_x(cfg.n);
  if (stop_after == "css") return s;
  twist_leg(s, cfg.chi, cfg.t_twist, cfg.echo);
  if (stop_after == "twisted") return s;
  s.rotate_x(pi / 2);
  s.rotate_z(cfg.phi);
  s.rotate_x(-pi / 2);
  if (stop_after == "rotated") return s;
  twist_leg(s, -2 * cfg.chi, cfg.t_twist / 2, cfg.echo);
  if (!stop_after.empty() && stop_after != "untwisted") throw std::invalid_argument("unknown protocol stage: " + stop_after);
  return s;
}

ProtocolResult run_protocol(const ProtocolConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("run_protocol: need at least one particle");
  if (cfg.detection_noise < 0) throw std::invalid_argument("run_protocol: negative detection noise");
  const double d = 1e-3 / std::sqrt(static_cast<double>(cfg.n));
  const std::array<double, 3> phis{-d, 0.0, d};
  std::array<Readout, 3> r;
  Readout at;
  if (cfg.engine == Engine::IdealCollective) {
    for (int k = 0; k < 3; ++k) r[k] = ideal_readout(cfg, phis[k]);
    at = cfg.phi == 0 ? r[1] : ideal_readout(cfg, cfg.phi);
  } else {
    if (!cfg.full) throw std::invalid_argument("run_protocol: full engine needs coupling matrices");
    r = full_readouts(cfg, phis);
    at = cfg.phi == 0 ? r[1] : full_readouts(cfg, {cfg.phi, cfg.phi, cfg.phi})[0];
  }
  ProtocolResult out;
  out.mean_sy = at.mean;
  out.var_sy = at.var;
  out.sigma_sy0 = std::sqrt(r[1].var);
  out.slope = (r[2].mean - r[0].mean) / (2 * d);
  if (out.slope == 0 || !std::isfinite(out.slope)) throw std::runtime_error("run_protocol: zero signal slope");
  return with_detection_noise(out, cfg.n, cfg.detection_noise);
}

ProtocolResult with_detection_noise(const ProtocolResult& r, int n, double noise) {
  ProtocolResult o = r;
  const double sigma = std::sqrt(r.sigma_sy0 * r.sigma_sy0 + noise * noise);
  o.dphi = sigma / std::abs(r.slope);
  o.gain = 1 / (n * o.dphi * o.dphi);
  return o;
}

OptimalSqueezing optimal_oat(int n, double chi, double t_max, int points) {
  if (points < 2 || !(t_max > 0)) throw std::invalid_argument("optimal_oat: bad grid");
  OptimalSqueezing best;
  const double dt = t_max / points;
  auto s = CollectiveState::css_x(n);
  for (int k = 1; k <= points; ++k) {
    s.twist(chi, dt);
    double x;
    try {
      x = s.xi2();
    } catch (const std::domain_error&) {
      break;
    }
    if (x < best.xi2) best = {k * dt, x};
  }
  return best;
}

double field_sensitivity(double dphi, double phase_time, double slope, double cycle_time) {
  if (slope == 0) throw std::domain_error("field_sensitivity: zero transition slope");
  if (!(phase_time > 0)) throw std::domain_error("field_sensitivity: phase time must be positive");
  const double cyc = cycle_time > 0 ? cycle_time : phase_time;
  return dphi / (2 * pi * std::abs(slope) * phase_time) * std::sqrt(cyc);
}

double dphi_from_gain_db(int n, double gain_db) { return 1 / std::sqrt(n * std::pow(10.0, gain_db / 10)); }

}  // namespace molspin

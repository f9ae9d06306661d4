#include "molspin/thermal.hpp"

#include "molspin/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace molspin {

namespace {

constexpr double top_occupation = 1e-4;

double fermi(double e, double mu, double t) {
  const double x = (e - mu) / t;
  if (x > 700) return 0.0;
  return 1.0 / (std::exp(x) + 1.0);
}

}  // namespace

int thermal_pool_emax(double n_target, double t_over_tf) {
  if (!(n_target >= 1)) throw std::invalid_argument("thermal_pool_emax: need at least one particle");
  if (t_over_tf < 0) throw std::invalid_argument("thermal_pool_emax: negative temperature");
  int e = 0;
  double filled = 0;
  while (filled + e + 1 < n_target) filled += ++e;  // shells 0..e-1 hold e(e+1)/2
  if (t_over_tf == 0) return e;
  const double t = t_over_tf * std::sqrt(2 * n_target);
  // generous: the chemical potential never exceeds E_F, so E_F + t*ln(1/eps) bounds the tail
  return static_cast<int>(std::ceil(std::sqrt(2 * n_target) + t * std::log(1 / top_occupation))) + 2;
}

double fermi_occupation(const ThermalState& th, double energy) {
  if (th.t_over_tf == 0) return energy < th.mu_chem ? 1.0 : 0.0;
  return fermi(energy, th.mu_chem, th.temperature());
}

ThermalState solve_thermal(double n_target, double t_over_tf, const ModeSet& pool) {
  ThermalState th;
  th.n_target = n_target;
  th.t_over_tf = t_over_tf;
  th.fermi_energy = std::sqrt(2 * n_target);
  if (pool.size() < n_target) throw std::invalid_argument("solve_thermal: mode pool smaller than the particle number");
  if (t_over_tf == 0) {
    th.mu_chem = pool.modes[static_cast<std::size_t>(n_target) - 1].energy() + 0.5;
    return th;
  }
  const double t = th.temperature();
  int emax = 0;
  for (const auto& m : pool.modes) emax = std::max(emax, m.energy());
  auto count = [&](double mu) {
    double s = 0;
    for (const auto& m : pool.modes) s += fermi(m.energy(), mu, t);
    return s;
  };
  double lo = -50 * t - th.fermi_energy, hi = emax;
  if (count(hi) < n_target) throw std::invalid_argument("solve_thermal: pool too small for this temperature");
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) < n_target ? lo : hi) = mid;
  }
  th.mu_chem = 0.5 * (lo + hi);
  if (fermi(emax, th.mu_chem, t) > top_occupation)
    throw std::invalid_argument("solve_thermal: top pooled shell too occupied, enlarge the pool");
  return th;
}

ModeSet thermal_occupancy(const ThermalState& th, const ModeSet& pool) {
  ModeSet ms = pool;
  for (std::size_t i = 0; i < ms.size(); ++i) ms.occupancy[i] = fermi_occupation(th, ms.modes[i].energy());
  return ms;
}

std::vector<std::size_t> sample_modes(const ThermalState& th, const ModeSet& pool, std::uint64_t seed,
                                      std::uint64_t stream) {
  std::vector<std::size_t> occ;
  if (th.t_over_tf == 0) {
    const auto n = static_cast<std::size_t>(th.n_target);
    if (pool.size() < n) throw std::invalid_argument("sample_modes: pool too small");
    for (std::size_t i = 0; i < n; ++i) occ.push_back(i);
    return occ;
  }
  auto g = make_stream(seed, stream);
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (uniform01(g) < fermi_occupation(th, pool.modes[i].energy())) occ.push_back(i);
  return occ;
}

}  // namespace molspin

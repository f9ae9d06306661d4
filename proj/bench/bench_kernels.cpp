// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "molspin/dynamics.hpp"
#include "molspin/hobasis.hpp"
#include "molspin/kinetic.hpp"
#include "molspin/rotor.hpp"
#include "molspin/spinmodel.hpp"

#include <map>

using namespace molspin;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

const CouplingMatrix& couplings(std::size_t n) {
  static std::map<std::size_t, CouplingMatrix> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    const TrapGeometry g;
    const auto t = build_interaction_table(ModeSet::shell_fill(n), g.c1());
    it = cache.emplace(n, build_couplings(t, dipole_moments(stark_solve({3.0, 10}), Basis::II), g)).first;
  }
  return it->second;
}

void BM_propagate(benchmark::State& s) {
  const auto& cm = couplings(static_cast<std::size_t>(s.range(1)));
  StepControl ctl;
  ctl.exec = exec_of(s);
  ctl.dt = stable_dt(cm);
  const auto e0 = dtwa_initial(Eigen::Vector3d::UnitX(), cm.n(), 256, 0);
  for (auto _ : s) {
    auto e = e0;
    propagate(e, cm, 20 * ctl.dt, ctl);
    benchmark::DoNotOptimize(e.sx.data());
  }
  s.SetItemsProcessed(s.iterations() * 20 * 256);
}
BENCHMARK(BM_propagate)->ArgsProduct({{0, 1}, {100, 400}})->Unit(benchmark::kMillisecond);

void BM_table(benchmark::State& s) {
  const ModeSet ms = ModeSet::shell_fill(static_cast<std::size_t>(s.range(1)));
  const PairTable pt(40, TrapGeometry{}.c1());
  for (auto _ : s) benchmark::DoNotOptimize(build_interaction_table(ms, pt, exec_of(s)).hartree.data());
}
BENCHMARK(BM_table)->ArgsProduct({{0, 1}, {200, 800}})->Unit(benchmark::kMillisecond);

void BM_relaxation(benchmark::State& s) {
  const KineticParams kp;
  for (auto _ : s) benchmark::DoNotOptimize(relaxation_rate(kp, 1 << 16, 0, exec_of(s), 1.0).tau);
}
BENCHMARK(BM_relaxation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

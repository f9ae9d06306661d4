// End-to-end checks. One PASS/FAIL line per criterion; exit status 1 if any fail.
// Usage: acceptance [criterion numbers...]   (default: all)

#include "cli.hpp"

#include "molspin/kinetic.hpp"
#include "molspin/losses.hpp"
#include "molspin/metrology.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace molspin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const fs::path work = fs::temp_directory_path() / "molspin-acceptance";

std::string dir_for(int c) {
  const auto d = work / ("c" + std::to_string(c));
  fs::remove_all(d);
  fs::create_directories(d);
  return d.string();
}

void cli(const std::string& dir, std::vector<std::string> args) {
  args.insert(args.begin(), {"molspin", "--quiet", "--out-dir", dir});
  const int rc = cli::run(args);
  if (rc != 0) throw std::runtime_error("molspin " + args[4] + " exited with " + std::to_string(rc));
}

nlohmann::json load(const std::string& dir, const std::string& name) {
  std::ifstream is(fs::path(dir) / name);
  nlohmann::json j;
  is >> j;
  return j;
}

// column name -> values
std::map<std::string, std::vector<double>> read_csv(const std::string& dir, const std::string& name) {
  std::ifstream is(fs::path(dir) / name);
  std::string line, cell;
  std::getline(is, line);
  std::vector<std::string> cols;
  for (std::stringstream ss(line); std::getline(ss, cell, ',');) cols.push_back(cell);
  std::map<std::string, std::vector<double>> out;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    for (const auto& c : cols) {
      std::getline(ss, cell, ',');
      out[c].push_back(std::stod(cell));
    }
  }
  return out;
}

std::string g6(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const double c1 = TrapGeometry{}.c1();

Outcome c1_oracle() {
  std::vector<Mode> modes;
  for (int x = 0; x <= 10; ++x)
    for (int y = 0; y <= 10; ++y) modes.push_back({x, y});
  std::mt19937 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < 100) {
    auto a = pick(rng), b = pick(rng);
    if (a != b) pairs.insert({std::min(a, b), std::max(a, b)});
  }
  double worst = 0;
  int count = 0;
  for (auto [i, j] : pairs) {
    const Mode a = modes[i], b = modes[j];
    worst = std::max(worst, rel(hartree_element(a, b, c1).value, matrix_element_quadrature(a, b, b, a, c1)));
    worst = std::max(worst, rel(fock_element(a, b, c1).value, matrix_element_quadrature(a, b, a, b, c1)));
    count += 2;
  }
  return {count >= 200 && worst <= 1e-8,
          std::to_string(count) + " Hartree/exchange elements, indices <= 10: max relative deviation from 4D quadrature " +
              g6(worst) + " (limit 1e-8)"};
}

Outcome c2_precision() {
  double worst = 0;
  bool finite = true;
  for (int i = 0; i <= 40; ++i)
    for (auto [a, b] : {std::pair{Mode{0, 0}, Mode{i, i}}, std::pair{Mode{i, i}, Mode{i, i}}, std::pair{Mode{0, 0}, Mode{i, 0}}}) {
      const auto e = hartree_element(a, b, c1);
      const auto d = matrix_element_fixed(a, b, b, a, c1, 2 * e.bits);
      finite &= std::isfinite(e.value) && std::isfinite(d.value);
      worst = std::max(worst, rel(e.value, d.value));
    }
  return {finite && worst <= 1e-10,
          "Hartree diagonals to index 40 under precision doubling: max change " + g6(worst) + (finite ? "" : ", non-finite values")};
}

Outcome c3_scaling() {
  const auto d = dir_for(3);
  cli(d, {"scaling", "--imin", "20", "--imax", "60"});
  const auto j = load(d, "scaling.json");
  const double diag = j["diagonal"]["exponent"], edge = j["edge"]["exponent"];
  const double eq = j["semiclassical_equal_energy"]["exponent"], fix = j["semiclassical_fixed_e1"]["exponent"];
  const bool ok_diag = std::abs(diag + 0.5) <= 0.15, ok_edge = std::abs(edge) < 0.2;
  const bool ok_eq = std::abs(eq + 1.5) <= 1e-10, ok_fix = std::abs(fix + 0.5) <= 1e-10;
  return {ok_diag && ok_edge && ok_eq && ok_fix,
          "diagonal exponent " + g6(diag) + (ok_diag ? "" : " (outside -0.5 +- 0.15)") + "; edge " + g6(edge) +
              "; semiclassical equal-energy " + std::to_string(eq) + "; fixed-E1 " + g6(fix) +
              (ok_fix ? "" : " (expected -0.5; g(b) ~ b^2/2 makes the closed form fall as E2^-3/2)")};
}

Outcome c4_contrast() {
  const auto d = dir_for(4);
  cli(d, {"couplings", "--n", "200"});
  const auto j = load(d, "couplings.json");
  const double r = j["cv_ratio"];
  return {r >= 5, "CV lattice / CV trap = " + g6(r) + " (CV trap " + g6(j["cv_trap"]) + ", lattice " + g6(j["cv_lattice"]) + ")"};
}

Outcome c5_basis() {
  const auto d = dir_for(5);
  cli(d, {"spinmodel", "--n", "200", "--field-min", "0", "--field-max", "10", "--points", "201"});
  const auto j = load(d, "spinmodel.json");
  const double ratio = j["chi_ratio_II_over_I"];
  bool in_window = false;
  std::string zs;
  for (const auto& z : j["jbar_perp_II_zero_crossings"]) {
    in_window |= z.get<double>() >= 6 && z.get<double>() <= 8;
    zs += (zs.empty() ? "" : ",") + g6(z.get<double>());
  }
  const bool ok_ratio = std::abs(ratio + 2) <= 2e-12;
  return {ok_ratio && in_window, "chi(II)/chi(I) = " + std::to_string(ratio) + "; Jbar_perp(II) zero crossings at E = " +
                                     (zs.empty() ? "none" : zs) + " B/d"};
}

Outcome c6_dpt() {
  const auto d = dir_for(6);
  cli(d, {"dpt", "--n", "1000", "--fields", "5", "--dephasings", "0,0.05,0.2,0.5,1.0", "--t-avg", "0.015"});
  const auto t = read_csv(d, "fig2a.csv");
  const auto& dw = t.at("dephasing");
  const auto& c = t.at("c_av");
  double c005 = NAN, c1 = NAN;
  bool mono = true;
  std::string list;
  for (std::size_t i = 0; i < dw.size(); ++i) {
    if (dw[i] == 0.05) c005 = c[i];
    if (dw[i] == 1.0) c1 = c[i];
    if (i) mono &= c[i] < c[i - 1];
    list += (i ? ", " : "") + g6(dw[i]) + ":" + g6(c[i]);
  }
  return {c005 > 0.8 && c1 < 0.3 && mono, "C_av by dephasing {" + list + "}" + (mono ? "" : " (not monotone)")};
}

Outcome c7_squeezing() {
  const auto oat = optimal_oat(1000, 1.0, 3 * std::pow(1000.0, -2.0 / 3) / (2 * std::numbers::pi));
  const double exact_db = to_db(oat.xi2);

  // proxy: DTWA on the trap couplings against exact OAT with the same collective rate
  const TrapGeometry g;
  const auto table = build_interaction_table(ModeSet::shell_fill(200), g.c1());
  const double rate = collective_reduce(build_couplings(table, cli::dipoles_at(0, Basis::II), g)).oat_rate();
  const auto topt = optimal_oat(200, rate, 3 * std::pow(200.0, -2.0 / 3) / (2 * std::numbers::pi * std::abs(rate))).time;
  const auto d = dir_for(7);
  cli(d, {"squeeze", "--n", "200", "--traj", "2000", "--exact", "--t-max", fmt17(topt), "--record-dt",
          fmt17(topt / 10)});
  const auto t = read_csv(d, "fig3a.csv");
  double worst = 0;
  for (std::size_t i = 1; i < t.at("time").size(); ++i)
    worst = std::max(worst, rel(t.at("xi2")[i], t.at("xi2_exact_oat")[i]));
  std::string detail = "exact OAT N=1000 optimum " + g6(exact_db) + " dB; DTWA N=200, 2000 trajectories vs exact up to t_opt = " +
                       g6(topt * 1e3) + " ms: max relative xi2 deviation " + g6(worst);
  bool pass = exact_db >= 18 && worst <= 0.10;
  if (std::getenv("MOLSPIN_LONG")) {
    const auto dl = dir_for(70);
    cli(dl, {"squeeze", "--n", "1000", "--traj", "10000", "--t-max", "0.004", "--record-dt", "1e-4"});
    const double db = load(dl, "squeeze.json")["best_db"];
    pass &= std::abs(db - 19) <= 2;
    detail += "; long run N=1000, 1e4 trajectories: " + g6(db) + " dB";
  } else {
    detail += "; long N=1000 DTWA run skipped (set MOLSPIN_LONG=1)";
  }
  return {pass, detail};
}

Outcome c8_thermal() {
  const auto d = dir_for(8);
  cli(d, {"squeeze", "--n", "200", "--dephasing", "0.1", "--scan-t", "0,0.25,0.5,1.0", "--traj", "1200", "--configs", "6",
          "--t-max", "0.008", "--record-dt", "2e-4"});
  const auto t = read_csv(d, "fig3b.csv");
  const auto& tt = t.at("t_over_tf");
  const auto& x = t.at("best_xi2");
  bool mono = true, survive = true;
  std::string list;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) mono &= x[i] > x[i - 1];
    if (tt[i] <= 0.5) survive &= x[i] < 1;
    list += (i ? ", " : "") + g6(tt[i]) + ":" + g6(x[i]);
  }
  return {mono && survive, "best xi2 by T/TF {" + list + "}" + (mono ? "" : " (not monotone)")};
}

Outcome c9_losses() {
  const auto d = dir_for(9);
  cli(d, {"losses", "--n", "200", "--t-over-tf", "0.1,0.5,1.0", "--dephasings", "0,0.05,0.2", "--t-max", "0.015"});
  const auto j = load(d, "losses.json");
  std::map<std::pair<double, double>, double> f;
  for (const auto& r : j["final"]) f[{r["t_over_tf"].get<double>(), r["dephasing"].get<double>()}] = r["n_ratio_final"];
  bool ok = true;
  std::string list;
  for (double tt : {0.1, 0.5, 1.0}) {
    ok &= f.at({tt, 0.0}) > 0.99 && f.at({tt, 0.2}) < f.at({tt, 0.05});
    list += (list.empty() ? "" : "; ") + ("T/TF " + g6(tt) + ": " + g6(f.at({tt, 0.0})) + ", " + g6(f.at({tt, 0.05})) + ", " +
                                          g6(f.at({tt, 0.2})));
  }
  // fully collective: every spin along the same axis, no relative dephasing
  const TrapGeometry g;
  const auto table = build_interaction_table(ModeSet::shell_fill(200), g.c1());
  const auto cm = build_couplings(table, cli::dipoles_at(0, Basis::II), g);
  const auto lt = build_loss_table(table.modes, g);
  const Eigen::VectorXd rho = Eigen::VectorXd::Ones(200);
  const double drho = loss_rhs(cm, lt, {rho / 2, Eigen::VectorXd::Zero(200), Eigen::VectorXd::Zero(200), rho}).rho.cwiseAbs().maxCoeff();
  ok &= drho <= 1e-15 * lt.gamma.maxCoeff();
  return {ok, "N(15 ms)/N0 at dephasing 0, 0.05, 0.2: " + list + "; collective |drho/dt| = " + g6(drho)};
}

Outcome c10_kinetic() {
  const auto d = dir_for(10);
  cli(d, {"kinetic-tau", "--n", "1000", "--t-over-tf", "1.0,0.7,0.5"});
  const auto t = read_csv(d, "figS5-trend.csv");
  const auto& tau = t.at("tau");
  const bool near = tau[0] >= 5.5e-3 && tau[0] <= 22e-3;
  const bool mono = tau[1] > tau[0] && tau[2] > tau[1];

  // Li2 identity against the phase-space integral at T = T_F
  const double n = 1000, temp = std::sqrt(2 * n);
  const double mu = semiclassical_mu(n, temp), beta = 1 / temp;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double cut = 40 / std::sqrt(beta);
  auto outer = [&](double p) {
    auto inner = [&](double r) {
      const double f = 1 / (std::exp(beta * ((p * p + r * r) / 2 - mu)) + 1);
      return r * f * (1 - f);
    };
    return p * p * p / 2 * GK::integrate(inner, 0.0, cut, 12, 1e-12);
  };
  const double den_rel = rel(relaxation_denominator(beta, mu), GK::integrate(outer, 0.0, cut, 12, 1e-11));

  const auto e = dir_for(100);
  cli(e, {"kinetic-evolve", "--n", "1000", "--t-over-tf", "1.0", "--dephasing", "0.05", "--t-max", "0.02"});
  const double decay = load(e, "kinetic-evolve.json")["decay_time"];
  const bool decay_ok = decay >= 2.5e-3 && decay <= 7.5e-3;
  return {near && mono && den_rel <= 1e-6 && decay_ok,
          "tau at T/TF 1.0, 0.7, 0.5 = " + g6(tau[0] * 1e3) + ", " + g6(tau[1] * 1e3) + ", " + g6(tau[2] * 1e3) + " ms" +
              (near ? "" : " (expected 11 ms within 2x)") + (mono ? "" : " (not increasing as T falls)") +
              "; denominator identity " + g6(den_rel) + "; non-interacting decay " + g6(decay * 1e3) + " ms" +
              (decay_ok ? "" : " (expected 5 ms +- 50%)")};
}

Outcome c11_protocol() {
  const auto d = dir_for(11);
  cli(d, {"protocol", "--n", "200", "--engine", "both", "--traj", "1000", "--noise-points", "21"});
  const auto t = read_csv(d, "fig4c.csv");
  const double sy = std::sqrt(200.0) / 2;  // projection noise of the reversed coherent state
  const double g0 = std::pow(10, t.at("gain_db_ideal")[0] / 10);
  double worst = 0;
  for (std::size_t i = 0; i < t.at("noise").size(); ++i) {
    const double ratio = std::pow(10, t.at("gain_db_ideal")[i] / 10) / g0;
    const double want = 1 / (1 + std::pow(t.at("noise")[i] / sy, 2));
    worst = std::max(worst, rel(ratio, want));
  }
  const auto j = load(d, "protocol.json");
  const double gi = j["gain_db_ideal"], gf = j["gain_db_full"], fid = j["reversal_fidelity"];
  return {worst <= 0.05 && std::abs(gi - gf) <= 2 && fid > 1 - 1e-10,
          "noise roll-off max deviation " + g6(worst) + "; gain ideal " + g6(gi) + " dB, full " + g6(gf) +
              " dB; reversal fidelity " + std::to_string(fid)};
}

Outcome c12_sensitivity() {
  const auto d = dir_for(12);
  cli(d, {"protocol", "--n", "1000", "--engine", "ideal", "--gain-db", "19", "--phase-time", "0.01", "--slope-field-kv", "1",
          "--noise-points", "1"});
  const double s = load(d, "protocol.json")["sensitivity"]["nv_per_cm_per_rt_hz"];
  return {s >= 94 && s <= 376, "Delta E = " + g6(s) + " (nV/cm)/sqrt(Hz) against 188 (factor-2 window)"};
}

Outcome c13_replay() {
  const auto d = dir_for(13);
  const std::vector<std::vector<std::string>> runs{
      {"dipoles", "--points", "11"},
      {"couplings", "--n", "40"},
      {"spinmodel", "--n", "40", "--points", "11"},
      {"scaling", "--imin", "2", "--imax", "12"},
      {"squeeze", "--n", "40", "--traj", "64", "--t-max", "0.002", "--t-over-tf", "0.5", "--configs", "2"},
      {"dpt", "--n", "40", "--dephasings", "0,0.5", "--t-avg", "0.002"},
      {"losses", "--n", "30", "--t-over-tf", "0.5", "--dephasings", "0.2", "--t-max", "0.002"},
      {"kinetic-tau", "--t-over-tf", "1", "--samples", "16384", "--max-rel-error", "0.5"},
      {"kinetic-evolve", "--t-max", "0.002", "--collisions"},
      {"protocol", "--n", "30", "--engine", "both", "--traj", "64", "--noise-points", "3"},
      {"wigner", "--n", "20", "--stage", "untwisted", "--theta-points", "10", "--phi-points", "20"}};
  int bad = 0;
  std::string failed;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto sub = (fs::path(d) / std::to_string(k)).string();
    fs::create_directories(sub);
    std::vector<std::string> args{"molspin", "--quiet", "--seed", "3", "--out-dir", sub};
    args.insert(args.end(), runs[k].begin(), runs[k].end());
    if (cli::run(args) != 0) throw std::runtime_error("run failed: " + runs[k][0]);
    std::string manifest;
    for (const auto& f : fs::directory_iterator(sub))
      if (f.path().string().ends_with(".manifest.json")) manifest = f.path().string();
    const int rc = cli::run(std::vector<std::string>{"molspin", "--quiet", "replay", manifest, "--into", sub + "-replay"});
    if (rc != 0) {
      ++bad;
      failed += " " + runs[k][0];
    }
  }
  return {bad == 0, std::to_string(runs.size() - bad) + "/" + std::to_string(runs.size()) +
                        " subcommands replayed bit-identically from their manifests" + (bad ? ";  differing:" + failed : "")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> all{
      {1, c1_oracle},     {2, c2_precision}, {3, c3_scaling},   {4, c4_contrast},  {5, c5_basis},
      {6, c6_dpt},        {7, c7_squeezing}, {8, c8_thermal},   {9, c9_losses},    {10, c10_kinetic},
      {11, c11_protocol}, {12, c12_sensitivity}, {13, c13_replay}};
  std::set<int> want;
  for (int i = 1; i < argc; ++i) want.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, fn] : all) {
    if (!want.empty() && !want.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << " [" << g6(s) << " s]"
              << std::endl;
  }
  fs::remove_all(work);
  return failures ? 1 : 0;
}

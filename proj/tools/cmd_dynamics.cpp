// squeeze, dpt, losses, wigner

#include "cli.hpp"

#include "molspin/collective.hpp"
#include "molspin/dynamics.hpp"
#include "molspin/losses.hpp"
#include "molspin/metrology.hpp"

#include <cmath>
#include <limits>

namespace molspin::cli {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Best {
  double xi2 = nan, time = nan;
};

Best best_squeezing(const ObservableSeries& s) {
  Best b;
  for (std::size_t i = 0; i < s.times.size(); ++i)
    if (std::isfinite(s.xi2[i]) && !(s.xi2[i] >= b.xi2)) b = {s.xi2[i], s.times[i]};
  return b;
}

struct SqueezeOpts {
  std::size_t n = 200;
  double t_over_tf = 0, field = 0;
  std::string basis = "II";
  std::size_t traj = 2000, configs = 10, block = 32;
  double t_max = 0.01, record_dt = 1e-4;
  bool mean_field = false, exact = false;
  std::vector<double> scan_t;
  GeometryOpts geo;
};

ObservableSeries squeeze_at(Run& run, const SqueezeOpts& o, double t_over_tf, CollectiveParams* params) {
  const auto g = o.geo.geometry();
  const auto tables = mode_configs(o.n, t_over_tf, o.configs, g.c1(), run.seed);
  const auto dm = dipoles_at(o.field, parse_basis(o.basis));
  gap_check(run, tables.front(), parse_basis(o.basis), o.field, g);
  std::vector<CouplingMatrix> cms;
  for (const auto& t : tables) cms.push_back(build_couplings(t, dm, g));
  if (params) *params = collective_reduce(cms.front());
  EvolveConfig cfg;
  cfg.t_max = o.t_max;
  cfg.record_dt = o.record_dt;
  cfg.mode = o.mean_field ? DynamicsMode::MeanField : DynamicsMode::DTWA;
  cfg.trajectories = o.traj;
  cfg.seed = run.seed;
  cfg.step.block = o.block;
  run.note("squeeze: T/TF = " + fmt17(t_over_tf) + ", " + std::to_string(cms.size()) + " configuration(s)");
  return cms.size() == 1 ? evolve(cms.front(), cfg) : evolve_thermal(cms, cfg);
}

void squeeze(Run& run, const SqueezeOpts& o) {
  if (!o.scan_t.empty()) {
    CsvTable t;
    t.columns = {"t_over_tf", "best_xi2", "best_db", "t_opt"};
    nlohmann::json rows = nlohmann::json::array();
    for (double tt : o.scan_t) {
      const auto b = best_squeezing(squeeze_at(run, o, tt, nullptr));
      t.add({tt, b.xi2, to_db(b.xi2), b.time});
      rows.push_back({{"t_over_tf", tt}, {"best_xi2", b.xi2}, {"t_opt", b.time}});
    }
    run.csv("fig3b.csv", t);
    run.json("squeeze.json", {{"scan", rows}, {"thermal_covariance", "within-configuration, averaged over samples"}});
    return;
  }
  CollectiveParams p;
  const auto s = squeeze_at(run, o, o.t_over_tf, &p);
  CsvTable t;
  t.columns = {"time", "xi2", "xi2_db", "contrast", "sx", "sy", "sz", "ntotal", "xi2_exact_oat"};
  std::optional<CollectiveState> oat;
  if (o.exact) oat = CollectiveState::css_x(static_cast<int>(o.n));
  double last = 0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    double ex = nan;
    if (oat) {
      oat->twist(p.oat_rate(), s.times[i] - last);
      last = s.times[i];
      ex = oat->xi2();
    }
    const auto& m = s.moments[i].mean;
    t.add({s.times[i], s.xi2[i], to_db(s.xi2[i]), s.contrast[i], m.x(), m.y(), m.z(), s.ntotal[i], ex});
  }
  run.csv("fig3a.csv", t);
  const auto b = best_squeezing(s);
  run.json("squeeze.json", {{"best_xi2", b.xi2},
                            {"best_db", to_db(b.xi2)},
                            {"t_opt", b.time},
                            {"chi", p.chi},
                            {"oat_rate", p.oat_rate()},
                            {"jbar_perp", p.jbar_perp}});
}

struct DptOpts {
  std::size_t n = 1000;
  std::vector<double> fields{5.0}, dephasings{0.0, 0.05, 0.2, 0.5, 1.0};
  double t_avg = 0.015, record_dt = 1e-4, threshold = 0.5;
  std::string basis = "II";
  GeometryOpts geo;
};

void dpt(Run& run, const DptOpts& o) {
  auto g = o.geo.geometry();
  const auto table = build_interaction_table(ModeSet::shell_fill(o.n), g.c1());
  CsvTable grid, slices;
  grid.columns = {"field", "dephasing", "c_av", "jbar_perp"};
  slices.columns = {"field", "dephasing", "time", "contrast"};
  nlohmann::json contour = nlohmann::json::array();
  for (double e : o.fields) {
    const auto dm = dipoles_at(e, parse_basis(o.basis));
    double prev_c = nan, prev_d = nan, crossing = nan;
    for (double d : o.dephasings) {
      g.delta_omega = d;
      const auto cm = build_couplings(table, dm, g);
      EvolveConfig cfg;
      cfg.t_max = o.t_avg;
      cfg.record_dt = o.record_dt;
      cfg.mode = DynamicsMode::MeanField;
      const auto s = evolve(cm, cfg);
      const double cav = time_average(s.times, s.contrast);
      grid.add({e, d, cav, collective_reduce(cm).jbar_perp});
      for (std::size_t i = 0; i < s.times.size(); ++i) slices.add({e, d, s.times[i], s.contrast[i]});
      if (std::isnan(crossing) && prev_c >= o.threshold && cav < o.threshold)
        crossing = prev_d + (d - prev_d) * (prev_c - o.threshold) / (prev_c - cav);
      prev_c = cav;
      prev_d = d;
      run.note("dpt: E = " + fmt17(e) + ", dephasing = " + fmt17(d) + ", C_av = " + fmt17(cav));
    }
    contour.push_back({{"field", e}, {"critical_dephasing", crossing}});
  }
  run.csv("fig2a.csv", grid);
  run.csv("fig2b.csv", slices);
  run.json("dpt.json", {{"threshold", o.threshold}, {"contour", contour}, {"t_avg", o.t_avg}});
}

struct LossOpts {
  std::size_t n = 200;
  std::vector<double> temps{0.1, 0.5, 1.0}, dephasings{0.0, 0.05, 0.2};
  double t_max = 0.015, record_dt = 5e-4, field = 0;
  std::string basis = "II";
  GeometryOpts geo;
};

void losses(Run& run, const LossOpts& o) {
  auto g = o.geo.geometry();
  const auto dm = dipoles_at(o.field, parse_basis(o.basis));
  CsvTable t;
  t.columns = {"t_over_tf", "dephasing", "time", "n_ratio", "contrast"};
  nlohmann::json fin = nlohmann::json::array();
  for (double tt : o.temps) {
    const auto table = mode_configs(o.n, tt, 1, g.c1(), run.seed).front();
    const auto lt = build_loss_table(table.modes, g);
    for (double d : o.dephasings) {
      g.delta_omega = d;
      const auto cm = build_couplings(table, dm, g);
      LossConfig lc;
      lc.t_max = o.t_max;
      lc.record_dt = o.record_dt;
      const auto s = evolve_with_losses(cm, lt, lc);
      for (std::size_t i = 0; i < s.times.size(); ++i)
        t.add({tt, d, s.times[i], s.ntotal[i] / s.ntotal.front(), s.contrast[i]});
      fin.push_back({{"t_over_tf", tt}, {"dephasing", d}, {"n0", s.ntotal.front()},
                     {"n_ratio_final", s.ntotal.back() / s.ntotal.front()}});
      run.note("losses: T/TF = " + fmt17(tt) + ", dephasing = " + fmt17(d));
    }
  }
  run.csv("figS6.csv", t);
  run.json("losses.json", {{"final", fin}, {"a_sc_bohr", krb::a_sc_bohr},
                           {"sampling", "one grand-canonical sample of occupied modes per temperature"}});
}

struct WignerOpts {
  int n = 200;
  double chi = 1.0, t_twist = 0, phi = 0;
  std::string stage = "twisted";
  int n_theta = 64, n_phi = 128;
  bool echo = true;
};

void wigner(Run& run, const WignerOpts& o) {
  ProtocolConfig pc;
  pc.n = o.n;
  pc.chi = o.chi;
  pc.phi = o.phi;
  pc.echo = o.echo;
  pc.t_twist = o.t_twist > 0 ? o.t_twist
                             : optimal_oat(o.n, o.chi, 3 * std::pow(o.n, -2.0 / 3) / (2 * std::numbers::pi * std::abs(o.chi))).time;
  const auto st = protocol_state(pc, o.stage);
  const auto q = husimi_grid(st, o.n_theta, o.n_phi);
  CsvTable t;
  t.columns = {"theta", "phi", "q"};
  for (Eigen::Index i = 0; i < q.theta.size(); ++i)
    for (Eigen::Index j = 0; j < q.phi.size(); ++j) t.add({q.theta(i), q.phi(j), q.q(i, j)});
  run.csv("wigner-" + o.stage + ".csv", t);
  const auto m = st.moments();
  double xi2 = nan;
  if (m.mean.norm() > 1e-6 * o.n) xi2 = squeezing_xi2(m);
  run.json("wigner-" + o.stage + ".json",
           {{"distribution", "Husimi Q"}, {"integral", q.integral()}, {"t_twist", pc.t_twist}, {"xi2", xi2},
            {"fidelity_to_css", st.fidelity(CollectiveState::css_x(o.n))}});
}

}  // namespace

void add_dynamics_commands(CLI::App& app, Registry& reg) {
  {
    auto o = std::make_shared<SqueezeOpts>();
    auto* s = app.add_subcommand("squeeze", "DTWA squeezing dynamics from a coherent state along x");
    s->add_option("--n", o->n)->check(CLI::Range(2, 20000));
    s->add_option("--t-over-tf", o->t_over_tf)->check(CLI::Range(0.0, 5.0));
    s->add_option("--field", o->field, "B/d")->check(CLI::NonNegativeNumber);
    add_basis(s, o->basis);
    s->add_option("--traj", o->traj, "trajectories in total")->check(CLI::PositiveNumber);
    s->add_option("--configs", o->configs, "thermal samples of occupied modes")->check(CLI::PositiveNumber);
    s->add_option("--block", o->block, "trajectories per work unit")->check(CLI::PositiveNumber);
    s->add_option("--t-max", o->t_max, "s")->check(CLI::PositiveNumber);
    s->add_option("--record-dt", o->record_dt, "s")->check(CLI::PositiveNumber);
    s->add_flag("--mean-field", o->mean_field, "single classical trajectory instead of DTWA");
    s->add_flag("--exact", o->exact, "add the exact one-axis-twisting curve with the same chi");
    s->add_option("--scan-t", o->scan_t, "list of T/TF; writes optimal squeezing per temperature")->delimiter(',');
    add_geometry(s, o->geo);
    reg.add(s, [o](Run& r) { squeeze(r, *o); });
  }
  {
    auto o = std::make_shared<DptOpts>();
    auto* s = app.add_subcommand("dpt", "time-averaged contrast over field and dephasing (mean field)");
    s->add_option("--n", o->n)->check(CLI::Range(2, 20000));
    s->add_option("--fields", o->fields, "B/d, comma separated")->delimiter(',');
    s->add_option("--dephasings", o->dephasings, "comma separated")->delimiter(',');
    s->add_option("--t-avg", o->t_avg, "averaging window (s)")->check(CLI::PositiveNumber);
    s->add_option("--record-dt", o->record_dt, "s")->check(CLI::PositiveNumber);
    s->add_option("--threshold", o->threshold, "contrast defining the transition")->check(CLI::Range(0.0, 1.0));
    add_basis(s, o->basis);
    add_geometry(s, o->geo, false);
    reg.add(s, [o](Run& r) { dpt(r, *o); });
  }
  {
    auto o = std::make_shared<LossOpts>();
    auto* s = app.add_subcommand("losses", "particle number under s-wave losses");
    s->add_option("--n", o->n)->check(CLI::Range(2, 20000));
    s->add_option("--t-over-tf", o->temps, "comma separated")->delimiter(',');
    s->add_option("--dephasings", o->dephasings, "comma separated")->delimiter(',');
    s->add_option("--t-max", o->t_max, "s")->check(CLI::PositiveNumber);
    s->add_option("--record-dt", o->record_dt, "s")->check(CLI::PositiveNumber);
    s->add_option("--field", o->field, "B/d")->check(CLI::NonNegativeNumber);
    add_basis(s, o->basis);
    add_geometry(s, o->geo, false);
    reg.add(s, [o](Run& r) { losses(r, *o); });
  }
  {
    auto o = std::make_shared<WignerOpts>();
    auto* s = app.add_subcommand("wigner", "Husimi distribution of the collective state along the protocol");
    s->add_option("--n", o->n)->check(CLI::Range(1, 4000));
    s->add_option("--chi", o->chi, "Hz")->check(CLI::PositiveNumber);
    s->add_option("--t-twist", o->t_twist, "s; 0 picks the optimal squeezing time")->check(CLI::NonNegativeNumber);
    s->add_option("--phi", o->phi);
    s->add_option("--stage", o->stage)->check(CLI::IsMember({"css", "twisted", "rotated", "untwisted"}));
    s->add_option("--theta-points", o->n_theta)->check(CLI::Range(4, 2000));
    s->add_option("--phi-points", o->n_phi)->check(CLI::Range(4, 4000));
    s->add_flag("!--no-echo", o->echo, "skip the pi pulses");
    reg.add(s, [o](Run& r) { wigner(r, *o); });
  }
}

}  // namespace molspin::cli

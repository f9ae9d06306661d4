// kinetic-tau, kinetic-evolve

#include "cli.hpp"

#include "molspin/kinetic.hpp"

#include <cmath>

namespace molspin::cli {

namespace {

struct TauOpts {
  double n = 1000;
  std::vector<double> temps{1.0, 0.7, 0.5};
  std::size_t samples = std::size_t{1} << 20;
  double max_rel_error = 0.05;
  GeometryOpts geo;
};

void kinetic_tau(Run& run, const TauOpts& o) {
  const auto g = o.geo.geometry();
  CsvTable t;
  t.columns = {"t_over_tf", "tau", "gamma", "rel_error", "numerator", "denominator"};
  for (double tt : o.temps) {
    KineticParams kp;
    kp.geom = g;
    kp.n = o.n;
    kp.t_over_tf = tt;
    const auto r = relaxation_rate(kp, o.samples, run.seed, Exec::Parallel, o.max_rel_error);
    t.add({tt, r.tau, r.gamma, r.rel_error, r.numerator, r.denominator});
    run.note("kinetic-tau: T/TF = " + fmt17(tt) + ", tau = " + fmt17(r.tau * 1e3) + " ms");
  }
  run.csv("figS5-trend.csv", t);
  const double add = dipole_length(g), a3 = a3d_from_dipole_length(add), a2 = a2d_from_geometry(g, a3);
  run.json("kinetic-tau.json", {{"a_dd_m", add},
                                {"a_3d_m", a3},
                                {"a_2d_m", a2},
                                {"bound_state_energy_hbar_omega", bound_state_energy(g, a2)},
                                {"samples", o.samples}});
  run.extra["assumptions"] = {"s-wave 2D T-matrix with a_3d = sqrt(sigma_dd / 4 pi), sigma_dd = 32 pi a_dd^2 / 15",
                              "classical phase-space integrals with the semiclassical chemical potential"};
}

struct EvolveOpts {
  double n = 1000, t_over_tf = 1.0;
  int shells = 32;
  bool collisions = false, interacting = false, shell_check = true;
  double field = 0;
  std::string basis = "II";
  double t_max = 0.02, record_dt = 1e-4;
  GeometryOpts geo;
};

void kinetic_evolve(Run& run, const EvolveOpts& o) {
  KineticParams kp;
  kp.geom = o.geo.geometry();
  kp.n = o.n;
  kp.t_over_tf = o.t_over_tf;
  kp.shells = o.shells;
  if (o.collisions) kp.gamma = relaxation_rate(kp, std::size_t{1} << 20, run.seed).gamma;

  std::optional<CouplingMatrix> cm;
  if (o.interacting) {
    const auto tables =
        mode_configs(static_cast<std::size_t>(o.n), o.t_over_tf, 1, kp.geom.c1(), run.seed);
    cm = build_couplings(tables.front(), dipoles_at(o.field, parse_basis(o.basis)), kp.geom);
  }
  auto kernel = [&](const KineticParams& p) { return cm ? shell_kernel(p, *cm) : shell_grid(p); };
  KineticConfig kc;
  kc.t_max = o.t_max;
  kc.record_dt = o.record_dt;
  const auto s = evolve_kinetic(kp, kernel(kp), kc);

  CsvTable t;
  t.columns = {"time", "sbar_norm", "sbar_x", "sbar_y", "sbar_z"};
  for (std::size_t i = 0; i < s.times.size(); ++i)
    t.add({s.times[i], s.sbar_norm[i], s.sbar[i].x(), s.sbar[i].y(), s.sbar[i].z()});
  run.csv("figS4.csv", t);

  nlohmann::json j{{"decay_time", decay_time(s)}, {"gamma", kp.gamma}, {"shells", o.shells},
                   {"interacting", o.interacting}, {"collisions", o.collisions}};
  if (o.shell_check) {
    KineticParams k2 = kp;
    k2.shells = 2 * kp.shells;
    const double d2 = decay_time(evolve_kinetic(k2, kernel(k2), kc));
    j["shell_check"] = {{"shells", k2.shells}, {"decay_time", d2},
                        {"relative_change", std::abs(d2 - decay_time(s)) / decay_time(s)}};
    if (std::abs(d2 - decay_time(s)) > 0.1 * decay_time(s))
      run.warn("decay time moves by more than 10% when the shell count doubles (" + fmt17(decay_time(s)) + " s against " +
               fmt17(d2) + " s)");
  }
  run.json("kinetic-evolve.json", j);
  run.extra["assumptions"] = {
      "shells linear in energy up to the 1e-3 occupation point, weights from the continuum Fermi-Dirac density",
      "interaction kernel: couplings averaged over occupied mode pairs in each shell pair, scaled by the source-shell population"};
}

}  // namespace

void add_kinetic_commands(CLI::App& app, Registry& reg) {
  {
    auto o = std::make_shared<TauOpts>();
    auto* s = app.add_subcommand("kinetic-tau", "collisional relaxation time of the collective spin");
    s->add_option("--n", o->n)->check(CLI::PositiveNumber);
    s->add_option("--t-over-tf", o->temps, "comma separated")->delimiter(',');
    s->add_option("--samples", o->samples, "Monte Carlo samples per temperature")->check(CLI::Range(1024, 1 << 30));
    s->add_option("--max-rel-error", o->max_rel_error)->check(CLI::PositiveNumber);
    add_geometry(s, o->geo, false);
    reg.add(s, [o](Run& r) { kinetic_tau(r, *o); });
  }
  {
    auto o = std::make_shared<EvolveOpts>();
    auto* s = app.add_subcommand("kinetic-evolve", "energy-shell spin dynamics with dephasing and collisions");
    s->add_option("--n", o->n)->check(CLI::PositiveNumber);
    s->add_option("--t-over-tf", o->t_over_tf)->check(CLI::Range(0.01, 5.0));
    s->add_option("--shells", o->shells)->check(CLI::Range(2, 4096));
    s->add_flag("--collisions", o->collisions, "relax toward the mean spin at the Monte Carlo rate");
    s->add_flag("--interacting", o->interacting, "include the mode-averaged XXZ couplings");
    s->add_flag("!--no-shell-check", o->shell_check, "skip the repeat with twice the shells");
    s->add_option("--field", o->field, "B/d")->check(CLI::NonNegativeNumber);
    add_basis(s, o->basis);
    s->add_option("--t-max", o->t_max, "s")->check(CLI::PositiveNumber);
    s->add_option("--record-dt", o->record_dt, "s")->check(CLI::PositiveNumber);
    o->geo.dephasing = 0.05;
    add_geometry(s, o->geo);
    reg.add(s, [o](Run& r) { kinetic_evolve(r, *o); });
  }
}

}  // namespace molspin::cli

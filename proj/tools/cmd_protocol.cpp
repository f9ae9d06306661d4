// protocol: twist-untwist gain against readout noise, and the field sensitivity it implies.

#include "cli.hpp"

#include "molspin/metrology.hpp"

#include <cmath>
#include <limits>

namespace molspin::cli {

namespace {

struct ProtocolOpts {
  int n = 200;
  double field = 0;
  std::string engine = "both";
  std::size_t traj = 2000;
  double t_twist = 0;
  double noise_max = -1;  // < 0: 2 sqrt(N)
  int noise_points = 21;
  bool echo = true;
  double phase_time = 0.01, cycle_time = 0, slope_field_kv = 1.0;
  double gain_db = 0;  // > 0 overrides the computed clean gain for the sensitivity estimate
  GeometryOpts geo;
};

void protocol(Run& run, const ProtocolOpts& o) {
  const auto g = o.geo.geometry();
  const auto table = build_interaction_table(ModeSet::shell_fill(static_cast<std::size_t>(o.n)), g.c1());
  const auto twist = build_couplings(table, dipoles_at(o.field, Basis::I), g);
  const auto untwist = build_couplings(table, dipoles_at(o.field, Basis::II), g);
  gap_check(run, table, Basis::I, o.field, g);
  const double chi = collective_reduce(twist).oat_rate();

  ProtocolConfig pc;
  pc.n = o.n;
  pc.chi = chi;
  pc.echo = o.echo;
  pc.t_twist = o.t_twist > 0 ? o.t_twist
                             : optimal_oat(o.n, chi, 3 * std::pow(o.n, -2.0 / 3) / (2 * std::numbers::pi * std::abs(chi))).time;

  const auto ideal = run_protocol(pc);
  std::optional<ProtocolResult> full;
  if (o.engine != "ideal") {
    pc.engine = Engine::FullSpinModel;
    pc.full = FullModelSetup{twist, untwist, o.traj, run.seed, {}};
    full = run_protocol(pc);
  }
  const double nmax = o.noise_max >= 0 ? o.noise_max : 2 * std::sqrt(static_cast<double>(o.n));
  CsvTable t;
  t.columns = {"noise", "gain_db_ideal", "gain_db_full", "gain_db_expected"};
  for (int k = 0; k < o.noise_points; ++k) {
    const double dz = o.noise_points == 1 ? 0 : nmax * k / (o.noise_points - 1);
    const double expected =
        ideal.gain_db() - 10 * std::log10(1 + std::pow(dz / ideal.sigma_sy0, 2));
    t.add({dz, o.engine == "full" ? std::numeric_limits<double>::quiet_NaN() : with_detection_noise(ideal, o.n, dz).gain_db(),
           full ? with_detection_noise(*full, o.n, dz).gain_db() : std::numeric_limits<double>::quiet_NaN(), expected});
  }
  run.csv("fig4c.csv", t);

  ProtocolConfig rev = pc;
  rev.engine = Engine::IdealCollective;
  rev.phi = 0;
  const double fidelity = protocol_state(rev).fidelity(CollectiveState::css_x(o.n));

  const double gdb = o.gain_db > 0 ? o.gain_db : (full ? full->gain_db() : ideal.gain_db());
  const double slope = transition_slope_hz_per_v_cm(o.slope_field_kv * 1e3, {0, 0}, {1, 0});
  const double dphi = dphi_from_gain_db(o.n, gdb);
  const double sens = field_sensitivity(dphi, o.phase_time, slope, o.cycle_time > 0 ? o.cycle_time : o.phase_time);
  nlohmann::json j{{"chi", chi},
                   {"t_twist", pc.t_twist},
                   {"gain_db_ideal", ideal.gain_db()},
                   {"sigma_sy0", ideal.sigma_sy0},
                   {"slope_ideal", ideal.slope},
                   {"reversal_fidelity", fidelity},
                   {"sensitivity",
                    {{"gain_db", gdb},
                     {"dphi", dphi},
                     {"phase_time", o.phase_time},
                     {"cycle_time", o.cycle_time > 0 ? o.cycle_time : o.phase_time},
                     {"assumption", o.cycle_time > 0 ? "cycle time as given" : "unit duty cycle: no dead time between shots"},
                     {"slope_hz_per_v_cm", slope},
                     {"v_per_cm_per_rt_hz", sens},
                     {"nv_per_cm_per_rt_hz", std::abs(sens) * 1e9}}}};
  if (full) {
    j["gain_db_full"] = full->gain_db();
    j["slope_full"] = full->slope;
    j["trajectories"] = o.traj;
  }
  run.json("protocol.json", j);
}

}  // namespace

void add_protocol_commands(CLI::App& app, Registry& reg) {
  auto o = std::make_shared<ProtocolOpts>();
  auto* s = app.add_subcommand("protocol", "twist-untwist phase estimation: gain versus readout noise");
  s->add_option("--n", o->n)->check(CLI::Range(2, 4000));
  s->add_option("--field", o->field, "B/d")->check(CLI::NonNegativeNumber);
  s->add_option("--engine", o->engine)->check(CLI::IsMember({"ideal", "full", "both"}));
  s->add_option("--traj", o->traj, "trajectories for the full model")->check(CLI::PositiveNumber);
  s->add_option("--t-twist", o->t_twist, "s; 0 picks the optimal squeezing time")->check(CLI::NonNegativeNumber);
  s->add_option("--noise-max", o->noise_max, "largest readout noise in spins; negative means 2 sqrt(N)");
  s->add_option("--noise-points", o->noise_points)->check(CLI::Range(1, 10000));
  s->add_flag("!--no-echo", o->echo, "skip the pi pulses");
  s->add_option("--phase-time", o->phase_time, "interrogation time (s)")->check(CLI::PositiveNumber);
  s->add_option("--cycle-time", o->cycle_time, "s; 0 means equal to the phase time")->check(CLI::NonNegativeNumber);
  s->add_option("--slope-field-kv", o->slope_field_kv, "bias field for the transition slope (kV/cm)");
  s->add_option("--gain-db", o->gain_db, "use this gain for the sensitivity instead of the computed one");
  add_geometry(s, o->geo);
  reg.add(s, [o](Run& r) { protocol(r, *o); });
}

}  // namespace molspin::cli

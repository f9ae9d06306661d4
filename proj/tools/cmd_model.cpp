// dipoles, couplings, spinmodel, scaling: everything that needs no time evolution.

#include "cli.hpp"

#include "molspin/hobasis.hpp"
#include "molspin/semiclassical.hpp"

#include <cmath>

namespace molspin::cli {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

struct DipoleOpts {
  double field_min = 0, field_max = 10;
  int points = 101, n_max = 10;
  double slope_field_kv = 1.0;
};

void dipoles(Run& run, const DipoleOpts& o) {
  CsvTable t;
  t.columns = {"field", "mu_down", "mu_up_I", "mu_ud_I", "mu_up_II", "mu_ud_II",
               "eta_I", "nu_I", "zeta_I", "eta_II", "nu_II", "zeta_II"};
  for (double e : linspace(o.field_min, o.field_max, o.points)) {
    const auto sol = stark_solve({e, o.n_max});
    const auto d1 = dipole_moments(sol, Basis::I), d2 = dipole_moments(sol, Basis::II);
    const auto c1 = coupling_scalars(d1), c2 = coupling_scalars(d2);
    t.add({e, d2.mu_down, d1.mu_up, d1.mu_ud, d2.mu_up, d2.mu_ud, c1.eta, c1.nu, c1.zeta, c2.eta, c2.nu, c2.zeta});
  }
  run.csv("figS2.csv", t);

  const double f = o.slope_field_kv * 1e3;
  run.json("dipoles.json",
           {{"slope_field_v_per_cm", f},
            {"slope_hz_per_v_cm_I", transition_slope_hz_per_v_cm(f, {0, 0}, {1, 1}, o.n_max)},
            {"slope_hz_per_v_cm_II", transition_slope_hz_per_v_cm(f, {0, 0}, {1, 0}, o.n_max)},
            {"truncation_error_at_field_max", truncation_error(o.field_max, o.n_max)},
            {"field_unit_v_per_cm", krb::field_unit_v_per_cm}});
}

struct CouplingOpts {
  std::size_t n = 200;
  double field = 0;
  std::string basis = "II";
  int lattice_nx = 20, lattice_ny = 10, bins = 40;
  GeometryOpts geo;
};

void couplings(Run& run, const CouplingOpts& o) {
  const auto g = o.geo.geometry();
  const auto table = build_interaction_table(ModeSet::shell_fill(o.n), g.c1());
  const auto trap = trap_couplings(table);
  const auto lattice = lattice_couplings(o.lattice_nx, o.lattice_ny);
  CsvTable t;
  t.columns = {"dataset", "center", "positive", "negative"};
  for (const auto& b : coupling_histogram(trap, o.bins))
    t.add({0, b.center, static_cast<double>(b.positive), static_cast<double>(b.negative)});
  for (const auto& b : coupling_histogram(lattice, o.bins))
    t.add({1, b.center, static_cast<double>(b.positive), static_cast<double>(b.negative)});
  run.csv("fig1d.csv", t);

  const auto cm = build_couplings(table, dipoles_at(o.field, parse_basis(o.basis)), g);
  const auto p = collective_reduce(cm);
  const double cv_trap = coefficient_of_variation(trap), cv_lat = coefficient_of_variation(lattice);
  run.json("couplings.json", {{"dataset_codes", {{"0", "trap modes (Fock - Hartree)"}, {"1", "square lattice 1/R^3"}}},
                              {"cv_trap", cv_trap},
                              {"cv_lattice", cv_lat},
                              {"cv_ratio", cv_lat / cv_trap},
                              {"c1", g.c1()},
                              {"energy_unit_hz", g.energy_unit_hz()},
                              {"jbar_perp", p.jbar_perp},
                              {"jbar_z", p.jbar_z},
                              {"chi", p.chi},
                              {"oat_rate", p.oat_rate()}});
  gap_check(run, table, parse_basis(o.basis), o.field, g);
}

struct SpinModelOpts {
  std::size_t n = 200;
  double field_min = 0, field_max = 10;
  int points = 41;
  GeometryOpts geo;
};

void spinmodel(Run& run, const SpinModelOpts& o) {
  const auto g = o.geo.geometry();
  const auto table = build_interaction_table(ModeSet::shell_fill(o.n), g.c1());
  CsvTable t;
  t.columns = {"field", "jbar_perp_I", "jbar_z_I", "chi_I", "hbar_z_I", "jbar_perp_II", "jbar_z_II", "chi_II", "hbar_z_II"};
  std::vector<double> fields = linspace(o.field_min, o.field_max, o.points), jp2;
  for (double e : fields) {
    const auto a = collective_reduce(build_couplings(table, dipoles_at(e, Basis::I), g));
    const auto b = collective_reduce(build_couplings(table, dipoles_at(e, Basis::II), g));
    t.add({e, a.jbar_perp, a.jbar_z, a.chi, a.hbar_z, b.jbar_perp, b.jbar_z, b.chi, b.hbar_z});
    jp2.push_back(b.jbar_perp);
  }
  run.csv("spinmodel.csv", t);

  nlohmann::json zeros = nlohmann::json::array();
  for (std::size_t i = 1; i < fields.size(); ++i)
    if ((jp2[i - 1] > 0) != (jp2[i] > 0))
      zeros.push_back(fields[i - 1] + (fields[i] - fields[i - 1]) * jp2[i - 1] / (jp2[i - 1] - jp2[i]));
  const auto i0 = collective_reduce(build_couplings(table, dipoles_at(0, Basis::I), g));
  const auto ii0 = collective_reduce(build_couplings(table, dipoles_at(0, Basis::II), g));
  run.json("spinmodel.json", {{"n", o.n},
                              {"jbar_perp_II_zero_crossings", zeros},
                              {"chi_I_zero_field", i0.chi},
                              {"chi_II_zero_field", ii0.chi},
                              {"chi_ratio_II_over_I", ii0.chi / i0.chi}});
}

struct ScalingOpts {
  int imin = 20, imax = 60;
  GeometryOpts geo;
};

void scaling(Run& run, const ScalingOpts& o) {
  if (o.imin < 1 || o.imax < o.imin + 7) throw CLI::ValidationError("--imax", "need at least 8 indices starting at 1");
  const auto g = o.geo.geometry();
  const PairTable pt(o.imax, g.c1());
  const double anis = g.omega_z / g.omega;
  CsvTable t;
  t.columns = {"index", "v_diag", "v_edge", "v_semiclassical_equal", "v_semiclassical_fixed_e1"};
  std::vector<std::pair<double, double>> diag, edge, sc_eq, sc_fix;
  const double e1 = 1.0;
  for (int i = o.imin; i <= o.imax; ++i) {
    const double vd = v_ho(pt, {i, i}), ve = v_ho(pt, {i, 0});
    const double e = 2.0 * i;
    const double s_eq = vd_semiclassical({e, e, anis, anis}), s_fix = vd_semiclassical({e1, e, anis, anis});
    t.add({static_cast<double>(i), vd, ve, s_eq, s_fix});
    diag.emplace_back(i, vd);
    edge.emplace_back(i, ve);
    sc_eq.emplace_back(e, s_eq);
    sc_fix.emplace_back(e, s_fix);
  }
  run.csv("figS3.csv", t);
  auto js = [](const PowerFit& f) {
    return nlohmann::json{{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"residual", f.residual}};
  };
  run.json("scaling.json", {{"diagonal", js(scaling_fit(diag))},
                            {"edge", js(scaling_fit(edge))},
                            {"semiclassical_equal_energy", js(scaling_fit(sc_eq))},
                            {"semiclassical_fixed_e1", js(scaling_fit(sc_fix))},
                            {"c1", g.c1()}});
}

}  // namespace

void add_model_commands(CLI::App& app, Registry& reg) {
  {
    auto o = std::make_shared<DipoleOpts>();
    auto* s = app.add_subcommand("dipoles", "dressed rotor dipole moments versus field");
    s->add_option("--field-min", o->field_min, "B/d");
    s->add_option("--field-max", o->field_max, "B/d")->check(CLI::NonNegativeNumber);
    s->add_option("--points", o->points)->check(CLI::Range(2, 100000));
    s->add_option("--n-max", o->n_max, "rotor truncation")->check(CLI::Range(2, 200));
    s->add_option("--slope-field-kv", o->slope_field_kv, "field for the transition slope (kV/cm)");
    reg.add(s, [o](Run& r) { dipoles(r, *o); });
  }
  {
    auto o = std::make_shared<CouplingOpts>();
    auto* s = app.add_subcommand("couplings", "distribution of trap-mode couplings against a real-space lattice");
    s->add_option("--n", o->n, "occupied modes (filled Fermi sea)")->check(CLI::Range(2, 20000));
    s->add_option("--field", o->field, "B/d")->check(CLI::NonNegativeNumber);
    add_basis(s, o->basis);
    s->add_option("--lattice-nx", o->lattice_nx)->check(CLI::PositiveNumber);
    s->add_option("--lattice-ny", o->lattice_ny)->check(CLI::PositiveNumber);
    s->add_option("--bins", o->bins)->check(CLI::Range(2, 1000));
    add_geometry(s, o->geo, false);
    reg.add(s, [o](Run& r) { couplings(r, *o); });
  }
  {
    auto o = std::make_shared<SpinModelOpts>();
    auto* s = app.add_subcommand("spinmodel", "collective couplings of both bases versus field");
    s->add_option("--n", o->n)->check(CLI::Range(2, 20000));
    s->add_option("--field-min", o->field_min, "B/d")->check(CLI::NonNegativeNumber);
    s->add_option("--field-max", o->field_max, "B/d")->check(CLI::NonNegativeNumber);
    s->add_option("--points", o->points)->check(CLI::Range(2, 100000));
    add_geometry(s, o->geo, false);
    reg.add(s, [o](Run& r) { spinmodel(r, *o); });
  }
  {
    auto o = std::make_shared<ScalingOpts>();
    auto* s = app.add_subcommand("scaling", "decay of the exchange-minus-direct term with mode index");
    s->add_option("--imin", o->imin)->check(CLI::Range(1, 400));
    s->add_option("--imax", o->imax)->check(CLI::Range(8, 400));
    add_geometry(s, o->geo, false);
    reg.add(s, [o](Run& r) { scaling(r, *o); });
  }
}

}  // namespace molspin::cli

#include "cli.hpp"

#include "molspin/thermal.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace molspin::cli {

namespace fs = std::filesystem;

std::string Run::path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

void Run::csv(const std::string& name, const CsvTable& t) {
  const auto p = path(name);
  write_csv(p, t);
  outputs.push_back(p);
}

void Run::json(const std::string& name, nlohmann::json j) {
  const auto p = path(name);
  write_json(p, std::move(j));
  outputs.push_back(p);
}

void Run::warn(const std::string& msg) {
  std::cerr << "warning: " << msg << "\n";
  extra["warnings"].push_back(msg);
}

void Run::note(const std::string& msg) const {
  if (!quiet) std::cerr << msg << "\n";
}

TrapGeometry GeometryOpts::geometry() const {
  TrapGeometry g;
  g.omega = 2 * std::numbers::pi * omega_hz;
  g.omega_z = 2 * std::numbers::pi * omega_z_hz;
  g.delta_omega = dephasing;
  g.validate();
  return g;
}

void add_geometry(CLI::App* sub, GeometryOpts& g, bool with_dephasing) {
  sub->add_option("--omega-hz", g.omega_hz, "in-plane trap frequency (Hz)")->check(CLI::PositiveNumber);
  sub->add_option("--omega-z-hz", g.omega_z_hz, "axial trap frequency (Hz)")->check(CLI::PositiveNumber);
  if (with_dephasing)
    sub->add_option("--dephasing", g.dephasing, "relative trap-frequency difference between the spin states")
        ->check(CLI::Range(0.0, 10.0));
}

Basis parse_basis(const std::string& s) {
  if (s == "I" || s == "1") return Basis::I;
  if (s == "II" || s == "2") return Basis::II;
  throw CLI::ValidationError("--basis", "expected I or II, got " + s);
}

CLI::Option* add_basis(CLI::App* sub, std::string& target) {
  return sub->add_option("--basis", target, "rotational basis: I = {|0,0>, |1,1>}, II = {|0,0>, |1,0>}")
      ->check(CLI::IsMember({"I", "II"}));
}

DipoleMoments dipoles_at(double field, Basis b, int n_max) { return dipole_moments(stark_solve({field, n_max}), b); }

std::vector<InteractionTable> mode_configs(std::size_t n, double t_over_tf, std::size_t configs, double c1,
                                           std::uint64_t seed) {
  std::vector<InteractionTable> out;
  if (t_over_tf <= 0) {
    out.push_back(build_interaction_table(ModeSet::shell_fill(n), c1));
    return out;
  }
  const auto pool = ModeSet::pool(thermal_pool_emax(static_cast<double>(n), t_over_tf));
  const auto th = solve_thermal(static_cast<double>(n), t_over_tf, pool);
  std::vector<ModeSet> sets;
  int top = 0;
  for (std::size_t k = 0; k < configs; ++k) {
    ModeSet ms;
    for (auto i : sample_modes(th, pool, seed, k)) {
      ms.modes.push_back(pool.modes[i]);
      ms.occupancy.push_back(1.0);
      top = std::max({top, pool.modes[i].nx, pool.modes[i].ny});
    }
    sets.push_back(std::move(ms));
  }
  const PairTable pt(top, c1);
  for (const auto& ms : sets) out.push_back(build_interaction_table(ms, pt));
  return out;
}

void gap_check(Run& run, const InteractionTable& t, Basis b, double field, const TrapGeometry& g) {
  // Both bases are checked: the protocol untwists in the other basis, so a closed gap there
  // matters even when the requested basis is fine.
  for (Basis x : {Basis::I, Basis::II}) {
    const double here = collective_reduce(build_couplings(t, dipoles_at(field, x), g)).jbar_perp;
    const double ref = collective_reduce(build_couplings(t, dipoles_at(0.0, x), g)).jbar_perp;
    if (std::abs(here) >= 0.15 * std::abs(ref)) continue;
    const std::string name = x == Basis::I ? "I" : "II";
    run.warn("collective gap of basis " + name + " nearly closed at field " + fmt17(field) + " B/d (|Jbar_perp| = " +
             fmt17(std::abs(here)) + " Hz against " + fmt17(std::abs(ref)) + " Hz at zero field)" +
             (x == b ? "; interaction protection is lost" : "; runs that switch to this basis are unprotected"));
  }
}

namespace {

nlohmann::json resolved_parameters(const CLI::App* sub) {
  nlohmann::json p = nlohmann::json::object();
  for (const CLI::Option* o : sub->get_options()) {
    const std::string name = o->get_single_name();
    if (name.empty() || name == "help") continue;
    if (o->count() > 0) {
      const auto& r = o->results();
      if (r.size() == 1)
        p[name] = r.front();
      else
        p[name] = r;
    } else {
      p[name] = o->get_default_str();
    }
  }
  return p;
}

int threads_from_env() {
  if (const char* s = std::getenv("MOLSPIN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) omp_set_num_threads(static_cast<int>(v));
    else std::cerr << "warning: ignoring MOLSPIN_THREADS=" << s << "\n";
  }
  return omp_get_max_threads();
}

// Re-executes a manifest's argument vector into another directory and compares output digests.
int replay(const std::string& manifest, const std::string& out_dir, bool quiet) {
  nlohmann::json want;
  const RunManifest m = read_manifest(manifest, &want);
  std::vector<std::string> args{"molspin", "--out-dir", out_dir, "--quiet"};
  for (std::size_t i = 0; i < m.argv.size(); ++i) {
    const auto& a = m.argv[i];
    if (a == "--out-dir" || a == "-o") {
      ++i;
      continue;
    }
    if (a.rfind("--out-dir=", 0) == 0 || a == "--quiet" || a == "-q") continue;
    args.push_back(a);
  }
  fs::create_directories(out_dir);
  const int rc = run(args);
  if (rc != 0) return rc;
  int mismatches = 0;
  for (const auto& o : want) {
    const auto name = fs::path(o.at("path").get<std::string>()).filename();
    const auto again = (fs::path(out_dir) / name).string();
    const auto d = fs::exists(again) ? file_digest(again) : std::string("missing");
    const bool same = d == o.at("digest").get<std::string>();
    if (!quiet || !same) std::cout << (same ? "identical " : "DIFFERENT ") << name.string() << "\n";
    mismatches += !same;
  }
  return mismatches ? 1 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> v;
  for (const auto& a : args) v.push_back(a.c_str());
  return run(static_cast<int>(v.size()), v.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"molspin: dipolar molecules in a quasi-2D trap, from rotor levels to squeezing protocols", "molspin"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML/INI file with option values");
  app.set_version_flag("--version", code_version());
  app.require_subcommand(0, 1);
  app.fallthrough();

  Run run;
  app.add_option("-o,--out-dir", run.out_dir, "directory for outputs");
  app.add_option("--seed", run.seed, "master RNG seed");
  app.add_flag("-q,--quiet", run.quiet, "no progress messages");

  Registry reg;
  add_model_commands(app, reg);
  add_dynamics_commands(app, reg);
  add_kinetic_commands(app, reg);
  add_protocol_commands(app, reg);

  std::string manifest, replay_dir = "replay";
  auto* rp = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  rp->add_option("manifest", manifest, "path to a .manifest.json")->required()->check(CLI::ExistingFile);
  rp->add_option("--into", replay_dir, "directory for the re-run outputs");

  if (argc <= 1) {
    std::cout << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (rp->parsed()) return replay(manifest, replay_dir, run.quiet);
    for (auto& [sub, action] : reg.commands) {
      if (!sub->parsed()) continue;
      const int threads = threads_from_env();
      fs::create_directories(run.out_dir);
      run.command = sub->get_name();
      run.extra["precision_policy"] = {
          {"pair_elements", "double, Talmi-Moshinsky pair table"},
          {"single_elements", "MPFR from 128 bits, doubled until successive values agree to 1e-12"}};
      const auto t0 = std::chrono::steady_clock::now();
      action(run);
      RunManifest m;
      m.command = run.command;
      m.argv.assign(argv + 1, argv + argc);
      m.parameters = resolved_parameters(sub);
      m.seed = run.seed;
      m.threads = threads;
      m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      m.outputs = run.outputs;
      m.extra = run.extra;
      const auto path = write_manifest(m);
      run.note("wrote " + path);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << app.help();
  return 2;
}

}  // namespace molspin::cli

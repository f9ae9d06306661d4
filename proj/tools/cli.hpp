#pragma once
// Shared plumbing for the molspin subcommands.

#include "molspin/io.hpp"
#include "molspin/rotor.hpp"
#include "molspin/spinmodel.hpp"
#include "molspin/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace molspin::cli {

// Everything a subcommand produces besides its files.
struct Run {
  std::string command;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool quiet = false;
  nlohmann::json extra = nlohmann::json::object();
  std::vector<std::string> outputs;

  std::string path(const std::string& name) const;
  void csv(const std::string& name, const CsvTable& t);
  void json(const std::string& name, nlohmann::json j);
  void warn(const std::string& msg);
  void note(const std::string& msg) const;  // progress on stderr unless quiet
};

using Action = std::function<void(Run&)>;

struct Registry {
  std::vector<std::pair<CLI::App*, Action>> commands;
  void add(CLI::App* sub, Action a) { commands.emplace_back(sub, std::move(a)); }
};

// Trap options shared by the physics subcommands.
struct GeometryOpts {
  double omega_hz = krb::omega / (2 * std::numbers::pi);
  double omega_z_hz = krb::omega_z / (2 * std::numbers::pi);
  double dephasing = 0.0;
  TrapGeometry geometry() const;
};
void add_geometry(CLI::App* sub, GeometryOpts& g, bool with_dephasing = true);

Basis parse_basis(const std::string& s);
CLI::Option* add_basis(CLI::App* sub, std::string& target);

// Dressed-state dipoles at a field in B/d (rotor truncated at n_max).
DipoleMoments dipoles_at(double field, Basis b, int n_max = 10);

// Occupied-mode configurations: T = 0 gives the filled Fermi sea once; T > 0 draws `configs`
// independent samples from the grand-canonical ensemble, stream k for sample k.
std::vector<InteractionTable> mode_configs(std::size_t n, double t_over_tf, std::size_t configs, double c1,
                                           std::uint64_t seed);

// Warns when |Jbar_perp| at this field is small compared with its zero-field value (the
// collective gap that protects against dephasing is closing).
void gap_check(Run& run, const InteractionTable& t, Basis b, double field, const TrapGeometry& g);

void add_model_commands(CLI::App& app, Registry& reg);
void add_dynamics_commands(CLI::App& app, Registry& reg);
void add_kinetic_commands(CLI::App& app, Registry& reg);
void add_protocol_commands(CLI::App& app, Registry& reg);

// Full front end. Returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace molspin::cli

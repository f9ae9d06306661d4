#pragma once
// Tabular output and run manifests. Every float is written with 17 significant digits.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace molspin {

inline constexpr int kSchemaVersion = 1;

std::string fmt17(double x);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  void add(std::vector<double> row);
};

// Throws std::runtime_error naming the path on IO failure.
void write_csv(const std::string& path, const CsvTable& t);
// Adds schema_version when missing.
void write_json(const std::string& path, nlohmann::json j);
// Same serializer, to a string.
std::string dump_json(const nlohmann::json& j, int indent = 2);

// FNV-1a 64 of the file contents, hex.
std::string file_digest(const std::string& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // full argument vector after the program name
  nlohmann::json parameters;      // resolved values
  std::uint64_t seed = 0;
  int threads = 1;
  double wall_seconds = 0;
  std::vector<std::string> outputs;
  nlohmann::json extra;  // assumptions, warnings
};

// Writes <first output>.manifest.json next to the outputs with their digests; returns its path.
std::string write_manifest(const RunManifest& m);
RunManifest read_manifest(const std::string& path, nlohmann::json* digests = nullptr);

std::string code_version();

}  // namespace molspin

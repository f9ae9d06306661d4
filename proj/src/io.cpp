#include "molspin/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#ifndef MOLSPIN_VERSION
#define MOLSPIN_VERSION "unknown"
#endif

namespace molspin {

std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("CsvTable: row width does not match header");
  rows.push_back(std::move(row));
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << fmt17(r[c]);
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

void dump(std::ostream& os, const nlohmann::json& j, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      // JSON has no inf/nan
      if (std::isfinite(x)) os << fmt17(x);
      else os << "null";
      break;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << nlohmann::json(it.key()).dump() << (indent > 0 ? ": " : ":");
        dump(os, it.value(), indent, level + 1);
      }
      os << nl << close << '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        break;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',' << nl;
        os << pad;
        dump(os, j[i], indent, level + 1);
      }
      os << nl << close << ']';
      break;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::ostringstream os;
  dump(os, j, indent, 0);
  return os.str();
}

void write_json(const std::string& path, nlohmann::json j) {
  if (j.is_object() && !j.contains("schema_version")) j["schema_version"] = kSchemaVersion;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << dump_json(j) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string file_digest(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string code_version() { return MOLSPIN_VERSION; }

std::string write_manifest(const RunManifest& m) {
  if (m.outputs.empty()) throw std::invalid_argument("write_manifest: no outputs to describe");
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["code_version"] = code_version();
  j["wall_seconds"] = m.wall_seconds;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& p : m.outputs) outs.push_back({{"path", p}, {"digest", file_digest(p)}});
  j["outputs"] = outs;
  if (!m.extra.is_null()) j["notes"] = m.extra;
  const std::string path = m.outputs.front() + ".manifest.json";
  write_json(path, j);
  return path;
}

RunManifest read_manifest(const std::string& path, nlohmann::json* digests) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read manifest " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest " + path + ": " + e.what());
  }
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.parameters = j.value("parameters", nlohmann::json::object());
  m.seed = j.value("seed", std::uint64_t{0});
  m.threads = j.value("threads", 1);
  for (const auto& o : j.at("outputs")) m.outputs.push_back(o.at("path").get<std::string>());
  if (digests) *digests = j.at("outputs");
  return m;
}

}  // namespace molspin

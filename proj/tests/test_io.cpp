#include <doctest.h>

#include "molspin/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace molspin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("17-digit formatting round-trips") {
  for (double x : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, 0.0})
    CHECK(std::stod(fmt17(x)) == x);
  CHECK(fmt17(0.1) == "0.10000000000000001");
  CHECK(fmt17(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(fmt17(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("CSV tables") {
  TempDir d("molspin-test-io-csv");
  CsvTable t;
  t.columns = {"a", "b"};
  CHECK_THROWS_AS(t.add({1.0}), std::invalid_argument);
  write_csv((d.path / "empty.csv").string(), t);
  CHECK(slurp(d.path / "empty.csv") == "a,b\n");
  t.add({1.0, 0.1});
  t.add({-3.0, 1e-20});
  write_csv((d.path / "t.csv").string(), t);
  CHECK(slurp(d.path / "t.csv") == "a,b\n1,0.10000000000000001\n-3,9.9999999999999995e-21\n");
  CHECK_THROWS_AS(write_csv((d.path / "missing" / "x.csv").string(), t), std::runtime_error);
}

TEST_CASE("JSON output") {
  TempDir d("molspin-test-io-json");
  nlohmann::json j{{"x", 0.1}, {"n", 3}, {"bad", std::nan("")}, {"list", {1.5, 2.5}}, {"name", "q"}};
  const auto p = (d.path / "o.json").string();
  write_json(p, j);
  std::ifstream is(p);
  nlohmann::json back;
  is >> back;
  CHECK(back.at("schema_version") == kSchemaVersion);
  CHECK(back.at("x").get<double>() == 0.1);
  CHECK(back.at("n").get<int>() == 3);
  CHECK(back.at("bad").is_null());
  CHECK(back.at("list")[1].get<double>() == 2.5);
  CHECK(slurp(p).find("0.10000000000000001") != std::string::npos);
  CHECK(dump_json(nlohmann::json::object(), 2) == "{}");
  CHECK(dump_json(nlohmann::json{{"a", 1}}, 0) == "{\"a\":1}");
}

TEST_CASE("run manifests") {
  TempDir d("molspin-test-io-manifest");
  const auto out = (d.path / "data.csv").string();
  std::ofstream(out) << "a\n1\n";
  RunManifest m;
  m.command = "squeeze";
  m.argv = {"squeeze", "--n", "10"};
  m.parameters = {{"n", "10"}};
  m.seed = 7;
  m.threads = 3;
  m.outputs = {out};
  m.extra = {{"warnings", {"w"}}};
  const auto path = write_manifest(m);
  CHECK(path == out + ".manifest.json");

  nlohmann::json digests;
  const auto r = read_manifest(path, &digests);
  CHECK(r.command == "squeeze");
  CHECK(r.argv == m.argv);
  CHECK(r.seed == 7);
  CHECK(r.threads == 3);
  REQUIRE(digests.size() == 1);
  CHECK(digests[0].at("digest") == file_digest(out));

  std::ofstream(out) << "a\n2\n";
  CHECK(file_digest(out) != digests[0].at("digest").get<std::string>());
  CHECK_THROWS(write_manifest(RunManifest{}));
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(read_manifest(path), std::runtime_error);
}

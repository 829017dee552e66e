#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "quasispec/cli.hpp"
#include "quasispec/report.hpp"

using namespace quasispec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("quasispec_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

}  // namespace

TEST_CASE("solve with the zero potential") {
  const auto dir = scratch("solve");
  RunConfig cfg;
  cfg.command = "solve";
  cfg.potential_path = write_file(dir, "zero.json", "{}").string();
  cfg.N = 5;
  cfg.output_dir = (dir / "out").string();
  REQUIRE(run(cfg) == 0);
  std::istringstream csv(slurp(dir / "out" / "spectrum.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "n,re_lambda,im_lambda,re_s,im_s,multiplicity");
  for (int n = 1; n <= 5; ++n) {
    REQUIRE(std::getline(csv, line));
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    CHECK(std::stoi(cell) == n);
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) == doctest::Approx(n * n).epsilon(1e-12));
  }
  const auto meta = nlohmann::json::parse(slurp(dir / "out" / "solve.json"))["metadata"];
  CHECK(meta["version"] == kVersion);
  CHECK(meta["potential_hash"].get<std::string>().size() == 16);
}

TEST_CASE("sweep output is byte-identical across runs") {
  const auto dir = scratch("sweep");
  RunConfig cfg;
  cfg.command = "sweep";
  cfg.samples = 3;
  cfg.N = 12;
  cfg.output_dir = (dir / "a").string();
  REQUIRE(run(cfg) == 0);
  cfg.output_dir = (dir / "b").string();
  REQUIRE(run(cfg) == 0);
  CHECK(slurp(dir / "a" / "sweep.json") == slurp(dir / "b" / "sweep.json"));
  cfg.seed = 8;
  cfg.output_dir = (dir / "c").string();
  REQUIRE(run(cfg) == 0);
  CHECK(slurp(dir / "a" / "sweep.json") != slurp(dir / "c" / "sweep.json"));
}

TEST_CASE("exit codes and error payloads") {
  const auto dir = scratch("errors");
  RunConfig cfg;
  cfg.output_dir = (dir / "out").string();
  cfg.command = "solve";
  CHECK(run(cfg) == kExitParse);
  const auto err = nlohmann::json::parse(slurp(dir / "out" / "error.json"));
  CHECK(err["error"]["kind"] == "parse");
  cfg.potential_path = write_file(dir, "bad.json", "{\"jumps\": [{\"at\": 9, \"height\": 1}]}").string();
  CHECK(run(cfg) == kExitParse);
  cfg.potential_path = write_file(dir, "broken.json", "{").string();
  CHECK(run(cfg) == kExitParse);
  cfg.command = "resolvent";
  cfg.potential_path = write_file(dir, "zero.json", "{}").string();
  cfg.lambda = 4.2;
  CHECK(run(cfg) == kExitNumerical);
}

TEST_CASE("json emitter prints 17 significant digits") {
  CHECK(dump_json(nlohmann::json{{"x", 0.1}}, -1) == "{\"x\":0.10000000000000001}\n");
  CHECK(dump_json(nlohmann::json{{"b", 1}, {"a", std::nan("")}}, -1) == "{\"a\":null,\"b\":1}\n");
  CHECK(potential_hash(Potential::zero()) == potential_hash(Potential::zero()));
  CHECK(potential_hash(Potential::zero()) != potential_hash(Potential::constant(1.0)));
}

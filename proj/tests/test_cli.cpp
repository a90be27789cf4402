#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "trrsim/controller.hpp"
#include "trrsim/error.hpp"
#include "trrsim/kernels.hpp"
#include "trrsim/run_config.hpp"

using namespace trrsim;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "trrsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("trrsim-test-" + std::to_string(Rng(std::random_device{}()).next()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("cli: no arguments prints usage and fails") {
  const auto r = run({});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
}

TEST_CASE("cli: unknown subcommand and bad options") {
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"fuzz", "--budget", "many"}).code == 1);
}

TEST_CASE("cli: fuzz writes a ranked CSV and names the best pattern") {
  TempDir dir;
  write_file(dir.path / "case1.json", R"({"seed": 4, "mitigation": {"preset": "case_one", "hidden": true}})");
  const auto r = run({"fuzz", "--config", (dir.path / "case1.json").string(), "--budget", "40", "--out",
                      (dir.path / "out").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("best pattern") != std::string::npos);
  const auto csv = slurp(dir.path / "out" / "fuzz.csv");
  CHECK(csv.rfind("candidate_index,nomenclature,cardinality,flips\n", 0) == 0);
  const auto doc = nlohmann::json::parse(slurp(dir.path / "out" / "fuzz.json"));
  CHECK(doc["config"]["mitigation"] == nlohmann::json{{"hidden", true}});
}

TEST_CASE("cli: spd reports an unlimited MAC") {
  TempDir dir;
  std::string dump(256, '\0');
  dump[7] = static_cast<char>(0b1000);
  write_file(dir.path / "dump.bin", dump);
  const auto r = run({"spd", "--file", (dir.path / "dump.bin").string(), "--gen", "ddr4", "--out",
                      (dir.path / "out").string()});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["mac"] == "unlimited");
  CHECK(doc["generation"] == "ddr4");
  CHECK(doc["compliance"] == "trr_compliant");

  dump[7] = static_cast<char>(0b1111);
  write_file(dir.path / "bad.bin", dump);
  CHECK(run({"spd", "--file", (dir.path / "bad.bin").string(), "--out", (dir.path / "out").string()}).code == 2);
  CHECK(run({"spd", "--file", (dir.path / "missing.bin").string()}).code == 1);
}

TEST_CASE("cli: configuration errors exit with 1") {
  TempDir dir;
  write_file(dir.path / "broken.json", "{ not json");
  CHECK(run({"grid", "--config", (dir.path / "broken.json").string()}).code == 1);
  write_file(dir.path / "preset.json", R"({"mitigation": "nonexistent"})");
  CHECK(run({"grid", "--config", (dir.path / "preset.json").string()}).code == 1);
  CHECK(run({"grid", "--config", (dir.path / "absent.json").string()}).code == 1);
  CHECK(run({"fuzz", "--max-cardinality", "40", "--out", (dir.path / "o").string()}).code == 1);
}

TEST_CASE("cli: detect-refresh on a flat trace is a runtime error") {
  TempDir dir;
  std::string csv = "timestamp_ns,latency_ns\n";
  for (int i = 0; i < 500; ++i) csv += std::to_string(i * 50) + ",100\n";
  write_file(dir.path / "flat.csv", csv);
  const auto r = run({"detect-refresh", "--trace", (dir.path / "flat.csv").string(), "--out",
                      (dir.path / "o").string()});
  CHECK(r.code == 2);
  const auto ok = run({"detect-refresh", "--t-refi", "3900", "--jitter", "50", "--out", (dir.path / "o").string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("double") != std::string::npos);
}

TEST_CASE("cli: output directory from the environment") {
  TempDir dir;
  const auto target = dir.path / "from-env";
  ::setenv("TRRSIM_OUTPUT_DIR", target.c_str(), 1);
  const auto r = run({"sweep", "--seed", "3"});
  ::unsetenv("TRRSIM_OUTPUT_DIR");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(target / "sweep.csv"));
}

TEST_CASE("cli: reruns produce byte-identical CSV") {
  TempDir dir;
  write_file(dir.path / "c.json", R"({"seed": 12, "mitigation": "case_two",
    "experiments": {"grid": {"n_values": [2, 5, 7], "r_values": [0, 2, 6]}}})");
  const auto cfg = (dir.path / "c.json").string();
  const std::vector<std::vector<std::string>> commands{
      {"fuzz", "--budget", "12", "--threads", "2"}, {"grid"}, {"sweep", "--n-max", "9"},
      {"min-act", "--rows", "4097,4099,4101"}, {"distance", "--n", "4", "--d", "3,12"},
      {"repeat", "--trials", "3", "--acts", "50000"}, {"double-refresh", "--budget", "4"}};
  for (const auto& c : commands) {
    std::vector<std::string> csvs;
    for (const char* out : {"a", "b"}) {
      auto args = c;
      args.insert(args.end(), {"--config", cfg, "--out", (dir.path / out).string()});
      REQUIRE(run(args).code == 0);
    }
    for (const auto& entry : fs::directory_iterator(dir.path / "a"))
      if (entry.path().extension() == ".csv")
        CHECK(slurp(entry.path()) == slurp(dir.path / "b" / entry.path().filename()));
  }
}

TEST_CASE("run config") {
  const auto doc = nlohmann::json::parse(R"({
    "seed": 5,
    "geometry": {"banks": 4, "rows_per_bank": 1024},
    "timing": {"t_refi_ns": 3900},
    "vulnerability": {"ddr_generation": "ddr3", "weak_cell_density": 0.002},
    "mitigation": {"preset": "modern", "hidden": true},
    "address_mapping": {"bank_functions": ["0x22000", "0x44000"], "row_mask": "0x3ffe0000", "column_mask": "0x1fff"},
    "experiments": {"fuzz": {"candidate_budget": 7, "seed": 2}}
  })");
  auto c = RunConfig::from_json(doc);
  CHECK(c.geometry.banks == 4);
  CHECK(c.timing.t_refi_ns == 3900);
  CHECK(c.vulnerability.generation == DdrGeneration::ddr3);
  CHECK(c.vulnerability.threshold_mean == 139'000);
  CHECK(c.mitigation == make_preset("modern"));
  CHECK(c.hidden);
  CHECK(c.mapping.has_value());
  CHECK(c.to_json()["mitigation"] == nlohmann::json{{"hidden", true}});
  c.apply_seed(9);
  CHECK(c.seed == 9);
  CHECK(c.vulnerability.seed == 9);
  CHECK(c.experiment("fuzz")["seed"] == 9);
  CHECK(c.experiment("absent").empty());
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse(R"({"mitigation": 4})")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse("[1]")), ConfigError);
}

TEST_CASE("simulation results do not depend on the kernel ISA") {
  const auto profile = test::default_profile(6);
  auto run_once = [&] {
    DramSimulator sim(profile->geometry(), {}, profile, make_preset("case_two"));
    HammerSchedule s;
    s.aggressors = {4096, 4098, 4100, 4102, 4104, 4106, 4108, 4110};
    s.activations_per_aggressor = 500'000;
    s.sync_to_refresh = true;
    return hammer_with_refresh(sim, s, RefreshMode::standard).flips;
  };
  const auto saved = kernels::active_isa();
  kernels::set_active_isa(kernels::Isa::scalar);
  const auto scalar = run_once();
  kernels::set_active_isa(kernels::Isa::avx2);
  const auto wide = run_once();
  kernels::set_active_isa(saved);
  CHECK(!scalar.empty());
  CHECK(scalar == wide);
}

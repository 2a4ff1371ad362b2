// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "eigenfracture/eigenfracture.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  const auto p = fs::temp_directory_path() / "eigenfracture_capi" / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("configuration handles") {
  ef_config* cfg = nullptr;
  CHECK(ef_config_parse("{\"material\": {\"eps\": }", &cfg) == EF_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(ef_last_error()).find("line 1") != std::string::npos);
  CHECK(ef_config_parse(nullptr, &cfg) == EF_ERR_ARGUMENT);
  CHECK(ef_config_load("/nonexistent.json", &cfg) == EF_ERR_CONFIG);

  REQUIRE(ef_config_parse("{\"seed\": 4}", &cfg) == EF_OK);
  CHECK(std::string(ef_last_error()).empty());
  std::uint64_t h1 = 0, h2 = 0;
  ef_config_hash(cfg, &h1);
  ef_config_set_threads(cfg, 3);
  ef_config_set_output_dir(cfg, "x");
  ef_config_hash(cfg, &h2);
  CHECK(h1 == h2);
  ef_config_set_seed(cfg, 5);
  ef_config_hash(cfg, &h2);
  CHECK(h1 != h2);
  CHECK(ef_config_set_threads(cfg, -1) == EF_ERR_ARGUMENT);
  ef_config_free(cfg);
  CHECK(ef_config_set_seed(nullptr, 1) == EF_ERR_ARGUMENT);
  CHECK(std::string(ef_version()).size() > 0);
}

TEST_CASE("zero-load simulation writes a ledger of zeros") {
  const auto dir = scratch("zero");
  ef_config* cfg = nullptr;
  REQUIRE(ef_config_parse(R"({"material": {"eps": 0.15}, "resolution": {"h": 0.1}, "time": {"m": 2},
                              "load": {"kind": "zero"}, "output": {"vtk_every": 2}})", &cfg) == EF_OK);
  ef_config_set_output_dir(cfg, dir.c_str());
  ef_run* run = nullptr;
  REQUIRE(ef_simulate(cfg, &run) == EF_OK);
  CHECK(ef_run_node_count(run) == 5);
  CHECK(ef_run_rupture_node(run) == -1);
  ef_node_info info{};
  CHECK(ef_run_node(run, 4, &info) == EF_OK);
  CHECK(info.t == 1.0);
  CHECK(info.elastic == 0.0);
  CHECK(ef_run_node(run, 5, &info) == EF_ERR_ARGUMENT);
  ef_run_free(run);

  std::ifstream in(dir / "ledger.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto rest = line.substr(line.find(',') + 1);
    CHECK(rest.substr(rest.find(',') + 1) == "0,0,0,0,0,0,0");
    ++rows;
  }
  CHECK(rows == 5);
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(fs::exists(dir / "snapshot_0000.vtk"));
  CHECK(fs::exists(dir / "snapshot_0002.vtk"));
  CHECK(fs::exists(dir / "snapshot_0004.vtk"));
  CHECK_FALSE(fs::exists(dir / "snapshot_0001.vtk"));
  ef_config_free(cfg);
}

TEST_CASE("bar simulation reports the rupture node") {
  const auto dir = scratch("bar");
  ef_config* cfg = nullptr;
  REQUIRE(ef_config_parse(R"({"material": {"eps": 0.1}, "resolution": {"h": 0.1}, "time": {"m": 3},
                              "load": {"kind": "uniform_stretch", "amplitude": 2}})", &cfg) == EF_OK);
  ef_config_set_output_dir(cfg, dir.c_str());
  ef_run* run = nullptr;
  REQUIRE(ef_simulate(cfg, &run) == EF_OK);
  const long r = ef_run_rupture_node(run);
  REQUIRE(r > 0);
  for (std::size_t i = 0; i < ef_run_node_count(run); ++i) {
    ef_node_info info{};
    ef_run_node(run, i, &info);
    CHECK(info.rupture == (static_cast<long>(i) >= r ? 1 : 0));
  }
  ef_run_free(run);
  CHECK(ef_simulate(cfg, nullptr) == EF_OK);
  ef_config_free(cfg);
}

TEST_CASE("study and oracle dispatch") {
  const auto dir = scratch("study");
  ef_config* cfg = nullptr;
  REQUIRE(ef_config_parse(R"({"study": {"eps": [0.1, 0.08], "clouds": 5, "held_out": 5},
                              "oracle": {"instances": 0}})", &cfg) == EF_OK);
  ef_config_set_output_dir(cfg, dir.c_str());
  CHECK(ef_study(cfg, "spiral") == EF_ERR_CONFIG);
  CHECK(ef_study(cfg, "tube") == EF_OK);
  CHECK(fs::exists(dir / "tube.csv"));
  CHECK(ef_study(cfg, "growth") == EF_OK);
  CHECK(fs::exists(dir / "growth.csv"));
  ef_oracle_info info{};
  CHECK(ef_oracle(cfg, &info) == EF_ERR_CONFIG);
  ef_config_free(cfg);

  REQUIRE(ef_config_parse(R"({"oracle": {"instances": 6}})", &cfg) == EF_OK);
  ef_config_set_output_dir(cfg, dir.c_str());
  CHECK(ef_oracle(cfg, &info) == EF_OK);
  CHECK(info.instances == 6);
  CHECK(info.passed == 1);
  CHECK(fs::exists(dir / "oracle.csv"));
  ef_config_free(cfg);
}

TEST_CASE("unwritable output directory") {
  const auto blocker = scratch("blocker");
  fs::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "file";
  ef_config* cfg = nullptr;
  REQUIRE(ef_config_parse(R"({"resolution": {"h": 0.1}, "time": {"m": 0}})", &cfg) == EF_OK);
  ef_config_set_output_dir(cfg, (blocker / "sub").c_str());
  CHECK(ef_simulate(cfg, nullptr) == EF_ERR_IO);
  ef_config_free(cfg);
}

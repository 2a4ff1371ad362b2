// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>
#include <string>

#include "eigenfracture/config.hpp"
#include "eigenfracture/error.hpp"
#include "eigenfracture/io.hpp"

using namespace ef;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults and fields") {
  const auto cfg = parse_config(R"({
    "domain": {"omega": [0, 0, 2, 1], "collar_width": 0.2, "dirichlet_sides": ["left", "top"]},
    "material": {"eps": 0.05, "kappa": 2, "stiffness": [2, 0.1, 1]},
    "resolution": {"scale": 0.5, "exponent": 2},
    "time": {"m": 6},
    "load": {"kind": "shear_ramp", "amplitude": 3},
    "strategy": {"variant": "greedy", "nucleation": ["vertical"]},
    "seed": 9, "threads": 2
  })");
  CHECK(cfg.domain.omega.x1 == 2.0);
  CHECK(cfg.domain.dirichlet_sides == (kLeft | kTop));
  CHECK(cfg.params.c.c12 == 0.1);
  CHECK(cfg.resolution() == doctest::Approx(0.5 * 0.05 * 0.05));
  CHECK(cfg.m == 6);
  CHECK(cfg.load.kind == LoadKind::shear_ramp);
  CHECK(cfg.strategy.variant == StrategyVariant::greedy);
  CHECK(cfg.strategy.nucleation_vertical);
  CHECK_FALSE(cfg.strategy.nucleation_horizontal);
  CHECK(cfg.seed == 9);
  CHECK(parse_config("{}").m == 4);
  CHECK(parse_config(R"({"resolution": {"h": 0.01}})").resolution() == 0.01);
}

TEST_CASE("diagnostics name the line or the field") {
  CHECK(error_of("{\n  \"seed\": 1,\n}").find("line 3") != std::string::npos);
  CHECK(error_of(R"({"material": {"epz": 1}})").find("material.epz") != std::string::npos);
  CHECK(error_of(R"({"colour": 1})").find("colour") != std::string::npos);
  CHECK(error_of(R"({"material": {"eps": -1}})").find("material.eps") != std::string::npos);
  CHECK(error_of(R"({"material": {"stiffness": [1, 2, 1]}})").find("stiffness") != std::string::npos);
  CHECK(error_of(R"({"time": {"m": 30}})").find("time.m") != std::string::npos);
  CHECK(error_of(R"({"load": {"kind": "twist"}})").find("load.kind") != std::string::npos);
  CHECK(error_of(R"({"domain": {"dirichlet_sides": ["north"]}})").find("dirichlet_sides") != std::string::npos);
  CHECK(error_of(R"({"seed": "x"})").find("seed") != std::string::npos);
  CHECK(error_of("[1, 2]") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config hash covers the physics only") {
  const auto a = parse_config(R"({"material": {"eps": 0.05}})");
  const auto b = parse_config(R"({"material": {"eps": 0.05}, "threads": 7, "output": {"dir": "elsewhere"}})");
  const auto c = parse_config(R"({"material": {"eps": 0.06}})");
  const auto d = parse_config(R"({"material": {"eps": 0.05}, "seed": 3})");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash() != d.hash());
  CHECK(parse_config(a.canonical_json()).hash() == a.hash());
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("ledger CSV is versioned and reproducible") {
  const auto cfg = parse_config(R"({"material": {"eps": 0.15}, "resolution": {"h": 0.1}, "time": {"m": 3},
                                    "load": {"kind": "uniform_stretch", "amplitude": 2}})");
  const auto p = Problem::build(cfg.domain, cfg.resolution(), cfg.params);
  std::string outs[2];
  for (int k = 0; k < 2; ++k) {
    MinimizeStrategy s = cfg.strategy;
    s.threads = 1 + 2 * k;
    const auto traj = evolve(p, cfg.load, TimeGrid(cfg.m), s);
    std::ostringstream os;
    write_ledger(os, traj, cfg.hash());
    outs[k] = os.str();
  }
  CHECK(outs[0] == outs[1]);
  std::istringstream in(outs[0]);
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  CHECK(first == "# schema: eigenfracture.ledger v1 config: " + hex64(cfg.hash()));
  CHECK(header == "node,t,elastic,surface,lambda,cumulative_work,balance_defect,crack_size,rupture");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(rows == 9);
  CHECK(outs[0].find('\r') == std::string::npos);
}

TEST_CASE("VTK snapshot layout") {
  const auto p = Problem::build(DomainSpec{}, 0.2, EnergyParams{0.2, 1.0, {}});
  const auto traj = evolve(p, BoundaryLoad::stretch(1.0), TimeGrid(0), MinimizeStrategy{});
  std::ostringstream os;
  write_vtk(os, p, *traj.nodes.back().state, 1.0);
  const std::string v = os.str();
  CHECK(v.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  const std::string ns = std::to_string(p.mesh->num_simplices());
  CHECK(v.find("CELLS " + ns) != std::string::npos);
  CHECK(v.find("CELL_TYPES " + ns) != std::string::npos);
  for (const char* field : {"SCALARS u ", "SCALARS broken ", "SCALARS gamma_norm ", "SCALARS neighborhood ", "SCALARS goodset "})
    CHECK(v.find(field) != std::string::npos);
  const auto types = v.find("CELL_TYPES");
  std::istringstream in(v.substr(v.find('\n', types) + 1));
  for (std::size_t k = 0; k < p.mesh->num_simplices(); ++k) {
    int t = 0;
    in >> t;
    CHECK(t == 5);
  }
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_number(v)) == v);
}

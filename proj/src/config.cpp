// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "eigenfracture/error.hpp"

namespace ef {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

double RunConfig::resolution() const { return h ? *h : couple_resolution(params.eps, coupling); }

namespace {

const char* side_name(unsigned s) {
  switch (s) {
    case kLeft: return "left";
    case kRight: return "right";
    case kBottom: return "bottom";
    case kTop: return "top";
  }
  return "?";
}

std::string convention_name(VolumeConvention c) {
  return c == VolumeConvention::all_simplices ? "all_simplices" : "reference_only";
}

// Walks one JSON object, rejecting keys it was not asked about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "document" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool known = false;
      for (const char* a : keys) known = known || k == a;
      if (!known) fail(field(k), "unknown key");
    }
  }

  bool has(const char* k) const { return j_.contains(k); }
  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double number(const char* k, double def) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_number()) fail(field(k), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(field(k), "expected a finite number");
    return d;
  }
  double positive(const char* k, double def) const {
    const double d = number(k, def);
    if (!(d > 0.0)) fail(field(k), "must be positive");
    return d;
  }
  long long integer(const char* k, long long def, long long lo, long long hi) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_number_integer()) fail(field(k), "expected an integer");
    const long long i = v.get<long long>();
    if (i < lo || i > hi) fail(field(k), "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return i;
  }
  bool boolean(const char* k, bool def) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_boolean()) fail(field(k), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const char* k, const std::string& def) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_string()) fail(field(k), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char* k, std::vector<double> def, std::size_t exact = 0) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_array()) fail(field(k), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(field(k), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    if (exact && out.size() != exact) fail(field(k), "expected " + std::to_string(exact) + " entries");
    return out;
  }
  Section child(const char* k) const { return Section(j_.at(k), field(k)); }
  const json& raw(const char* k) const { return j_.at(k); }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config field '" + where + "': " + what);
  }

 private:
  const json& j_;
  std::string path_;
};

void read_domain(const Section& s, DomainSpec& d) {
  s.allow({"omega", "collar_width", "dirichlet_sides"});
  const auto o = s.numbers("omega", {d.omega.x0, d.omega.y0, d.omega.x1, d.omega.y1}, 4);
  d.omega = {o[0], o[1], o[2], o[3]};
  d.collar_width = s.positive("collar_width", d.collar_width);
  if (s.has("dirichlet_sides")) {
    const auto& v = s.raw("dirichlet_sides");
    if (!v.is_array()) Section::fail(s.field("dirichlet_sides"), "expected an array of side names");
    d.dirichlet_sides = 0;
    for (const auto& e : v) {
      const std::string n = e.is_string() ? e.get<std::string>() : "";
      unsigned bit = 0;
      for (unsigned b : {kLeft, kRight, kBottom, kTop})
        if (n == side_name(b)) bit = b;
      if (!bit) Section::fail(s.field("dirichlet_sides"), "unknown side '" + n + "'");
      d.dirichlet_sides |= bit;
    }
  }
  try {
    d.validate();
  } catch (const std::exception& e) {
    Section::fail(s.field("omega"), e.what());
  }
}

void read_material(const Section& s, EnergyParams& p) {
  s.allow({"eps", "kappa", "stiffness"});
  p.eps = s.positive("eps", p.eps);
  p.kappa = s.positive("kappa", p.kappa);
  const auto c = s.numbers("stiffness", {p.c.c11, p.c.c12, p.c.c22}, 3);
  p.c = {c[0], c[1], c[2]};
  if (!p.c.spd()) Section::fail(s.field("stiffness"), "tensor [c11, c12, c22] must be symmetric positive definite");
}

void read_load(const Section& s, BoundaryLoad& l) {
  s.allow({"kind", "amplitude", "c0", "c1", "c2", "power"});
  try {
    l.kind = parse_load_kind(s.string("kind", to_string(l.kind)));
  } catch (const std::invalid_argument& e) {
    Section::fail(s.field("kind"), e.what());
  }
  l.amplitude = s.number("amplitude", l.amplitude);
  l.c0 = s.number("c0", l.c0);
  l.c1 = s.number("c1", l.c1);
  l.c2 = s.number("c2", l.c2);
  l.power = s.number("power", l.power);
  if (!(l.power >= 1.0)) Section::fail(s.field("power"), "must be at least 1");
}

void read_strategy(const Section& s, MinimizeStrategy& m) {
  s.allow({"variant", "sweep_limit", "full_sweep", "exhaustive_cap", "top_k", "tie_tol", "nucleation"});
  try {
    m.variant = parse_strategy(s.string("variant", to_string(m.variant)));
  } catch (const std::invalid_argument& e) {
    Section::fail(s.field("variant"), e.what());
  }
  m.sweep_limit = static_cast<int>(s.integer("sweep_limit", m.sweep_limit, 1, 1000000));
  m.full_sweep = s.boolean("full_sweep", m.full_sweep);
  m.exhaustive_cap = static_cast<int>(s.integer("exhaustive_cap", m.exhaustive_cap, 0, 24));
  m.top_k = static_cast<int>(s.integer("top_k", m.top_k, 0, 1000000));
  m.tie_tol = s.number("tie_tol", m.tie_tol);
  if (m.tie_tol < 0.0) Section::fail(s.field("tie_tol"), "must be non-negative");
  if (s.has("nucleation")) {
    const auto& v = s.raw("nucleation");
    if (!v.is_array()) Section::fail(s.field("nucleation"), "expected an array of 'vertical'/'horizontal'");
    m.nucleation_vertical = m.nucleation_horizontal = false;
    for (const auto& e : v) {
      const std::string n = e.is_string() ? e.get<std::string>() : "";
      if (n == "vertical") m.nucleation_vertical = true;
      else if (n == "horizontal") m.nucleation_horizontal = true;
      else Section::fail(s.field("nucleation"), "unknown cut direction '" + n + "'");
    }
  }
}

void read_study(const Section& s, StudySettings& st) {
  s.allow({"eps", "segment", "kappa", "t_max", "m", "grids", "clouds", "held_out", "radii", "growth_constant"});
  st.eps = s.numbers("eps", st.eps);
  for (double e : st.eps)
    if (!(e > 0.0)) Section::fail(s.field("eps"), "entries must be positive");
  const auto seg = s.numbers("segment", {st.segment_a.x, st.segment_a.y, st.segment_b.x, st.segment_b.y}, 4);
  st.segment_a = {seg[0], seg[1]};
  st.segment_b = {seg[2], seg[3]};
  st.kappa = s.positive("kappa", st.kappa);
  st.t_max = s.positive("t_max", st.t_max);
  st.m = static_cast<int>(s.integer("m", st.m, 0, 20));
  if (s.has("grids")) {
    const auto g = s.numbers("grids", {});
    st.grids.clear();
    for (double v : g) {
      if (v != std::floor(v) || v < 0 || v > 20) Section::fail(s.field("grids"), "entries must be integers in [0, 20]");
      st.grids.push_back(static_cast<int>(v));
    }
  }
  st.clouds = static_cast<int>(s.integer("clouds", st.clouds, 0, 1000000));
  st.held_out = static_cast<int>(s.integer("held_out", st.held_out, 1, 1000000));
  if (s.has("radii")) {
    const auto& v = s.raw("radii");
    if (!v.is_array()) Section::fail(s.field("radii"), "expected an array of [r, r'] pairs");
    st.radii.clear();
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        Section::fail(s.field("radii"), "expected an array of [r, r'] pairs");
      const double r = e[0].get<double>(), rp = e[1].get<double>();
      if (!(r > 0.0) || !(rp > 0.0)) Section::fail(s.field("radii"), "radii must be positive");
      st.radii.emplace_back(r, rp);
    }
  }
  if (s.has("growth_constant")) st.growth_constant = s.positive("growth_constant", 1.0);
}

void read_oracle(const Section& s, OracleSettings& o) {
  s.allow({"instances", "bar_fraction", "match_threshold", "tolerance", "cells"});
  o.instances = static_cast<int>(s.integer("instances", o.instances, 0, 100000));
  o.bar_fraction = s.number("bar_fraction", o.bar_fraction);
  if (o.bar_fraction < 0.0 || o.bar_fraction > 1.0) Section::fail(s.field("bar_fraction"), "must lie in [0, 1]");
  o.match_threshold = s.number("match_threshold", o.match_threshold);
  if (o.match_threshold < 0.0 || o.match_threshold > 1.0)
    Section::fail(s.field("match_threshold"), "must lie in [0, 1]");
  o.tolerance = s.positive("tolerance", o.tolerance);
  o.cells = static_cast<int>(s.integer("cells", o.cells, 1, 8));
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError("config " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + msg);
  }
  RunConfig cfg;
  const Section root(doc, "");
  root.allow({"domain", "material", "resolution", "time", "load", "strategy", "convention", "output", "study",
              "oracle", "seed", "threads"});
  if (root.has("domain")) read_domain(root.child("domain"), cfg.domain);
  if (root.has("material")) read_material(root.child("material"), cfg.params);
  if (root.has("resolution")) {
    const Section s = root.child("resolution");
    s.allow({"scale", "exponent", "h"});
    cfg.coupling.scale = s.positive("scale", cfg.coupling.scale);
    cfg.coupling.exponent = s.number("exponent", cfg.coupling.exponent);
    if (!(cfg.coupling.exponent > 1.0)) Section::fail(s.field("exponent"), "must exceed 1");
    if (s.has("h")) cfg.h = s.positive("h", 1.0);
  }
  if (root.has("time")) {
    const Section s = root.child("time");
    s.allow({"m"});
    cfg.m = static_cast<int>(s.integer("m", cfg.m, 0, 20));
  }
  if (root.has("load")) read_load(root.child("load"), cfg.load);
  if (root.has("strategy")) read_strategy(root.child("strategy"), cfg.strategy);
  if (root.has("convention")) {
    const std::string c = root.string("convention", "all_simplices");
    if (c == "all_simplices") cfg.convention = VolumeConvention::all_simplices;
    else if (c == "reference_only") cfg.convention = VolumeConvention::reference_only;
    else Section::fail("convention", "expected 'all_simplices' or 'reference_only'");
  }
  if (root.has("output")) {
    const Section s = root.child("output");
    s.allow({"dir", "ledger", "vtk_every", "vtk_prefix"});
    cfg.output.dir = s.string("dir", cfg.output.dir);
    cfg.output.ledger = s.string("ledger", cfg.output.ledger);
    cfg.output.vtk_every = static_cast<int>(s.integer("vtk_every", cfg.output.vtk_every, 0, 1 << 20));
    cfg.output.vtk_prefix = s.string("vtk_prefix", cfg.output.vtk_prefix);
  }
  if (root.has("study")) read_study(root.child("study"), cfg.study);
  if (root.has("oracle")) read_oracle(root.child("oracle"), cfg.oracle);
  cfg.seed = static_cast<std::uint64_t>(root.integer("seed", 0, 0, INT64_MAX));
  cfg.threads = static_cast<int>(root.integer("threads", 0, 0, 1024));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string RunConfig::canonical_json() const {
  json j;
  const Rect& o = domain.omega;
  json sides = json::array();
  for (unsigned b : {kLeft, kRight, kBottom, kTop})
    if (domain.dirichlet_sides & b) sides.push_back(side_name(b));
  j["domain"] = {{"omega", {o.x0, o.y0, o.x1, o.y1}}, {"collar_width", domain.collar_width}, {"dirichlet_sides", sides}};
  j["material"] = {{"eps", params.eps}, {"kappa", params.kappa}, {"stiffness", {params.c.c11, params.c.c12, params.c.c22}}};
  j["resolution"] = {{"scale", coupling.scale}, {"exponent", coupling.exponent}, {"h", resolution()}};
  j["time"] = {{"m", m}};
  j["load"] = {{"kind", to_string(load.kind)}, {"amplitude", load.amplitude}, {"c0", load.c0},
               {"c1", load.c1},           {"c2", load.c2},               {"power", load.power}};
  json nuc = json::array();
  if (strategy.nucleation_vertical) nuc.push_back("vertical");
  if (strategy.nucleation_horizontal) nuc.push_back("horizontal");
  j["strategy"] = {{"variant", to_string(strategy.variant)}, {"sweep_limit", strategy.sweep_limit},
                   {"full_sweep", strategy.full_sweep},      {"exhaustive_cap", strategy.exhaustive_cap},
                   {"top_k", strategy.top_k},                {"tie_tol", strategy.tie_tol},
                   {"nucleation", nuc}};
  j["convention"] = convention_name(convention);
  json radii = json::array();
  for (const auto& [r, rp] : study.radii) radii.push_back({r, rp});
  j["study"] = {{"eps", study.eps},
                {"segment", {study.segment_a.x, study.segment_a.y, study.segment_b.x, study.segment_b.y}},
                {"kappa", study.kappa},
                {"t_max", study.t_max},
                {"m", study.m},
                {"grids", study.grids},
                {"clouds", study.clouds},
                {"held_out", study.held_out},
                {"radii", radii}};
  if (study.growth_constant) j["study"]["growth_constant"] = *study.growth_constant;
  j["oracle"] = {{"instances", oracle.instances},       {"bar_fraction", oracle.bar_fraction},
                 {"match_threshold", oracle.match_threshold}, {"tolerance", oracle.tolerance},
                 {"cells", oracle.cells}};
  j["seed"] = seed;
  return j.dump();
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical_json()); }

}  // namespace ef

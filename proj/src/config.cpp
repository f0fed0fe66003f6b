#include "ibvp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

#include "ibvp/boundary_admissibility.hpp"
#include "ibvp/fixtures.hpp"

namespace ibvp {

namespace pt = boost::property_tree;

namespace {

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || !std::isfinite(v)) {
    throw Error("config: '" + std::string(s) + "' is not a number (" +
                std::string(what) + ")");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

DataSpec DataSpec::parse(const std::string& text) {
  const auto parts = split(text, ':');
  DataSpec d;
  std::size_t arity = 0;
  if (parts[0] == "const") {
    d.kind = Kind::constant;
    arity = 1;
  } else if (parts[0] == "step") {
    d.kind = Kind::step;
    arity = 3;
  } else if (parts[0] == "sin") {
    d.kind = Kind::sine;
    arity = 4;
  } else if (parts[0] == "cos") {
    d.kind = Kind::cosine;
    arity = 4;
  } else {
    throw Error("data spec '" + text + "': unknown kind '" + parts[0] + "'");
  }
  if (parts.size() != arity + 1) {
    throw Error("data spec '" + text + "': expected " + std::to_string(arity) +
                " parameters");
  }
  d.params.clear();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    d.params.push_back(parse_double(parts[i], text));
  }
  return d;
}

std::string DataSpec::str() const {
  static constexpr const char* names[] = {"const", "step", "sin", "cos"};
  std::string s = names[static_cast<int>(kind)];
  for (double p : params) s += ":" + format_double(p);
  return s;
}

std::function<double(double)> DataSpec::function() const {
  const auto p = params;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (kind) {
    case Kind::constant:
      return [v = p[0]](double) { return v; };
    case Kind::step:
      return [p](double s) { return s < p[0] ? p[1] : p[2]; };
    case Kind::sine:
      return [p](double s) { return p[0] + p[1] * std::sin(two_pi * p[2] * s + p[3]); };
    case Kind::cosine:
      return [p](double s) { return p[0] + p[1] * std::cos(two_pi * p[2] * s + p[3]); };
  }
  throw Error("data spec: bad kind");
}

void ExperimentConfig::validate() const {
  make_flux(flux);
  if (!(b > a) || !(T > 0.0)) throw Error("config: need a < b and T > 0");
  if (cells < 4) throw Error("config: grid.cells must be >= 4");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw Error("config: grid.cfl must be in (0, 1]");
  if (!(tol > 0.0)) throw Error("config: tol must be positive");
  if (samples < 1) throw Error("config: sweep.samples must be >= 1");
  if (!(u_bound > 0.0)) throw Error("config: sweep.u_bound must be positive");
  if (!fault.empty()) {
    bool known = false;
    for (Condition c : kSweepConditions) known = known || to_string(c) == fault;
    if (!known) throw Error("config: unknown fault condition '" + fault + "'");
  }
  static const std::vector<std::string> defs = {"re", "mv+", "mv-", "e", "bln", "all"};
  if (std::find(defs.begin(), defs.end(), definition) == defs.end()) {
    throw Error("config: unknown definition '" + definition + "'");
  }
  if (field != "solve" && field != "exact") {
    throw Error("config: residuals.field must be 'solve' or 'exact'");
  }
  if (pair_index < 1 || k_points < 1 || min_k_points < 2) {
    throw Error("config: pair index and k grid sizes must be positive");
  }
  if (!(c_hi > c_lo) || !(c_tol > 0.0)) throw Error("config: bad min-constant bracket");
  if (std::abs(std::abs(nu) - 1.0) > 1e-12) throw Error("config: boundary.nu must be +-1");
}

IBVPProblem ExperimentConfig::problem() const {
  IBVPProblem p;
  p.flux = make_flux(flux);
  if (source_rate != 0.0) p.flux = with_linear_source(p.flux, source_rate);
  p.u0 = u0.function();
  p.ub_left = ub_left.function();
  p.ub_right = ub_right.function();
  p.a = a;
  p.b = b;
  p.T = T;
  p.validate();
  return p;
}

Grid1D ExperimentConfig::grid() const { return {cells, cfl, a, b}; }

namespace {

template <class T>
void read(const pt::ptree& tree, const std::string& key, T& out);

template <>
void read(const pt::ptree& tree, const std::string& key, double& out) {
  if (auto v = tree.get_optional<std::string>(key)) out = parse_double(*v, key);
}

template <>
void read(const pt::ptree& tree, const std::string& key, int& out) {
  if (auto v = tree.get_optional<std::string>(key)) {
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || p != v->data() + v->size()) {
      throw Error("config: '" + *v + "' is not an integer (" + key + ")");
    }
  }
}

template <>
void read(const pt::ptree& tree, const std::string& key, std::uint64_t& out) {
  if (auto v = tree.get_optional<std::string>(key)) {
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || p != v->data() + v->size()) {
      throw Error("config: '" + *v + "' is not an unsigned integer (" + key + ")");
    }
  }
}

template <>
void read(const pt::ptree& tree, const std::string& key, std::string& out) {
  if (auto v = tree.get_optional<std::string>(key)) out = *v;
}

template <>
void read(const pt::ptree& tree, const std::string& key, DataSpec& out) {
  if (auto v = tree.get_optional<std::string>(key)) out = DataSpec::parse(*v);
}

const std::vector<std::string> kKnownKeys = {
    "experiment.id", "experiment.seed", "experiment.tol", "experiment.output_dir",
    "problem.flux", "problem.source_rate", "problem.a", "problem.b", "problem.T",
    "problem.u0", "problem.ub_left", "problem.ub_right",
    "grid.cells", "grid.cfl",
    "sweep.samples", "sweep.u_bound", "sweep.fault",
    "residuals.definition", "residuals.field", "residuals.slack",
    "residuals.pair_index", "residuals.k_points",
    "min_constant.c_lo", "min_constant.c_hi", "min_constant.c_tol",
    "min_constant.k_points",
    "boundary.trace", "boundary.datum", "boundary.nu", "boundary.t", "boundary.xi"};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw Error("config: key '" + section + "' outside a section");
    }
    for (const auto& kv : body) {
      const std::string key = section + "." + kv.first;
      if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
        throw Error("config: unknown key '" + key + "'");
      }
    }
  }
  ExperimentConfig c;
  read(tree, "experiment.id", c.experiment);
  read(tree, "experiment.seed", c.seed);
  read(tree, "experiment.tol", c.tol);
  read(tree, "experiment.output_dir", c.output_dir);
  read(tree, "problem.flux", c.flux);
  read(tree, "problem.source_rate", c.source_rate);
  read(tree, "problem.a", c.a);
  read(tree, "problem.b", c.b);
  read(tree, "problem.T", c.T);
  read(tree, "problem.u0", c.u0);
  read(tree, "problem.ub_left", c.ub_left);
  read(tree, "problem.ub_right", c.ub_right);
  read(tree, "grid.cells", c.cells);
  read(tree, "grid.cfl", c.cfl);
  read(tree, "sweep.samples", c.samples);
  read(tree, "sweep.u_bound", c.u_bound);
  read(tree, "sweep.fault", c.fault);
  read(tree, "residuals.definition", c.definition);
  read(tree, "residuals.field", c.field);
  read(tree, "residuals.slack", c.slack);
  read(tree, "residuals.pair_index", c.pair_index);
  read(tree, "residuals.k_points", c.k_points);
  read(tree, "min_constant.c_lo", c.c_lo);
  read(tree, "min_constant.c_hi", c.c_hi);
  read(tree, "min_constant.c_tol", c.c_tol);
  read(tree, "min_constant.k_points", c.min_k_points);
  read(tree, "boundary.trace", c.trace);
  read(tree, "boundary.datum", c.datum);
  read(tree, "boundary.nu", c.nu);
  read(tree, "boundary.t", c.t);
  read(tree, "boundary.xi", c.xi);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto kv = [&](const char* k, const std::string& v) { out << k << " = " << v << '\n'; };
  auto num = [&](const char* k, double v) { kv(k, format_double(v)); };
  out << "[experiment]\n";
  kv("id", c.experiment);
  kv("seed", std::to_string(c.seed));
  num("tol", c.tol);
  kv("output_dir", c.output_dir);
  out << "\n[problem]\n";
  kv("flux", c.flux);
  num("source_rate", c.source_rate);
  num("a", c.a);
  num("b", c.b);
  num("T", c.T);
  kv("u0", c.u0.str());
  kv("ub_left", c.ub_left.str());
  kv("ub_right", c.ub_right.str());
  out << "\n[grid]\n";
  kv("cells", std::to_string(c.cells));
  num("cfl", c.cfl);
  out << "\n[sweep]\n";
  kv("samples", std::to_string(c.samples));
  num("u_bound", c.u_bound);
  kv("fault", c.fault);
  out << "\n[residuals]\n";
  kv("definition", c.definition);
  kv("field", c.field);
  num("slack", c.slack);
  kv("pair_index", std::to_string(c.pair_index));
  kv("k_points", std::to_string(c.k_points));
  out << "\n[min_constant]\n";
  num("c_lo", c.c_lo);
  num("c_hi", c.c_hi);
  num("c_tol", c.c_tol);
  kv("k_points", std::to_string(c.min_k_points));
  out << "\n[boundary]\n";
  num("trace", c.trace);
  num("datum", c.datum);
  num("nu", c.nu);
  num("t", c.t);
  num("xi", c.xi);
  return out.str();
}

std::string config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = {{"id", c.experiment}, {"seed", c.seed}, {"tol", c.tol},
                     {"output_dir", c.output_dir}};
  j["problem"] = {{"flux", c.flux},         {"source_rate", c.source_rate},
                  {"a", c.a},               {"b", c.b},
                  {"T", c.T},               {"u0", c.u0.str()},
                  {"ub_left", c.ub_left.str()}, {"ub_right", c.ub_right.str()}};
  j["grid"] = {{"cells", c.cells}, {"cfl", c.cfl}};
  j["sweep"] = {{"samples", c.samples}, {"u_bound", c.u_bound}, {"fault", c.fault}};
  j["residuals"] = {{"definition", c.definition}, {"field", c.field},
                    {"slack", c.slack},           {"pair_index", c.pair_index},
                    {"k_points", c.k_points}};
  j["min_constant"] = {{"c_lo", c.c_lo}, {"c_hi", c.c_hi}, {"c_tol", c.c_tol},
                       {"k_points", c.min_k_points}};
  j["boundary"] = {{"trace", c.trace}, {"datum", c.datum}, {"nu", c.nu},
                   {"t", c.t},         {"xi", c.xi}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(serialize_config(c))));
  return buf;
}

std::vector<std::string> preset_names() { return problem_names(); }

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.experiment = name;
  if (name == "reference") return c;
  if (name == "inadmissible") {
    c.u0 = DataSpec::parse("const:-1");
    c.ub_left = DataSpec::parse("const:-1");
    c.ub_right = DataSpec::parse("const:1");
    c.trace = -1.0;
    c.datum = 1.0;
    return c;
  }
  if (name == "advection") {
    c.flux = "linear:1";
    c.T = 0.5;
    c.u0 = DataSpec::parse("sin:0.5:0.25:1:0");
    c.ub_left = DataSpec::parse("sin:0.5:0.25:-1:0");
    c.ub_right = DataSpec::parse("const:0");
    c.trace = 0.5;
    c.datum = 0.0;
    return c;
  }
  for (const auto& r : boundary_riemann_suite()) {
    if (r.name == name) {
      c.T = 0.5;
      c.u0 = DataSpec{DataSpec::Kind::constant, {r.state}};
      c.ub_left = DataSpec{DataSpec::Kind::constant, {r.state}};
      c.ub_right = DataSpec{DataSpec::Kind::constant, {r.ghost}};
      c.trace = r.state;
      c.datum = r.ghost;
      return c;
    }
  }
  throw Error("unknown preset '" + name + "'");
}

}  // namespace ibvp

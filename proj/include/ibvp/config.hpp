/// \file
/// Experiment configuration: an INI file with sections, the data spec
/// grammar for u0 / u_b, presets and JSON export.
///
/// Data specs:
///   const:<v>
///   step:<x0>:<left>:<right>          left for s < x0, right otherwise
///   sin:<mean>:<amp>:<freq>:<phase>   mean + amp sin(2 pi freq s + phase)
///   cos:<mean>:<amp>:<freq>:<phase>

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ibvp/solver.hpp"

namespace ibvp {

struct DataSpec {
  enum class Kind { constant, step, sine, cosine };
  Kind kind = Kind::constant;
  std::vector<double> params{0.0};

  /// Throws Error on unknown kinds, wrong arity or non-numeric fields.
  static DataSpec parse(const std::string& text);
  std::string str() const;
  std::function<double(double)> function() const;
  bool operator==(const DataSpec&) const = default;
};

struct ExperimentConfig {
  std::string experiment = "reference";
  std::string flux = "burgers";
  double source_rate = 0.0;
  double a = 0.0;
  double b = 1.0;
  double T = 1.0;
  DataSpec u0 = DataSpec::parse("const:1");
  DataSpec ub_left = DataSpec::parse("const:1");
  DataSpec ub_right = DataSpec::parse("const:-1");

  int cells = 200;
  double cfl = 0.45;

  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string output_dir = "out";

  // equivalence sweep
  int samples = 10000;
  double u_bound = 2.0;
  std::string fault;  ///< empty, or a condition name

  // residuals
  std::string definition = "all";  ///< re, mv+, mv-, e, bln or all
  std::string field = "solve";     ///< solve or exact
  double slack = 4.0;  ///< calibrated on the boundary Riemann suite, M = 100..400
  int pair_index = 100;
  int k_points = 33;

  // min-constant
  double c_lo = 0.0;
  double c_hi = 2.0;
  double c_tol = 0.02;
  int min_k_points = 257;

  // check-boundary
  double trace = 1.0;
  double datum = -1.0;
  double nu = 1.0;
  double t = 0.5;
  double xi = 1.0;

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws Error when a name does not resolve or a value is out of range.
  void validate() const;
  IBVPProblem problem() const;
  Grid1D grid() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& c);
std::string config_json(const ExperimentConfig& c);
/// FNV-1a of the serialized config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

/// "reference", "inadmissible", "advection" and the boundary Riemann names.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace ibvp

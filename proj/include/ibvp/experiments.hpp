/// \file
/// Experiment drivers behind the CLI subcommands. Each command writes its
/// artifacts under the output directory and returns an exit code:
/// 0 when every verdict passes, 2 on a failed verdict, 1 on usage or
/// configuration errors (the CLI maps thrown Error to 1).

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ibvp/config.hpp"
#include "ibvp/residuals.hpp"

namespace ibvp {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// IBVP_OUTPUT_DIR when set, else the config's output_dir, joined with the
/// experiment id. The directory is created.
std::string output_directory(const ExperimentConfig& c);

struct CommandResult {
  int exit_code = 0;
  std::string summary;  ///< JSON
  std::vector<std::string> artifacts;
};

// ---------------------------------------------------------------------------
// Minimal boundary constant

struct MinConstantOptions {
  double c_lo = 0.0;
  double c_hi = 2.0;
  double c_tol = 0.02;
  int k_points = 257;  ///< uniform on [-U, U], U = view sup norm
  double tol = 1e-9;
};

struct ConstantProbe {
  double c = 0.0;
  double min_lhs = 0.0;
  double worst_k = 0.0;
  std::string worst_phi;
  std::string worst_sign;
  bool passed = false;
};

struct MinConstantReport {
  double c_star = 0.0;  ///< midpoint of the final bracket
  double lo = 0.0;      ///< largest failing constant found
  double hi = 0.0;      ///< smallest passing constant found
  bool bracket_valid = false;
  bool escalated = false;
  int k_points = 0;
  int probes = 0;
  std::vector<ConstantProbe> history;
};

/// Boundary-touching bumps: three per end point plus the two corners.
std::vector<TestFunction> boundary_test_functions(const IBVPProblem& problem);

/// MV residuals of both signs with multiplier c over the k grid and the
/// boundary-touching bumps.
ConstantProbe probe_constant(const SolutionView& view, double c, int k_points,
                             double tol);

/// Bisection on [c_lo, c_hi] for the smallest c passing probe_constant.
/// When the final bracket ends are within 10 tol of the threshold the k grid
/// is refined once (2 k - 1 points) and the bisection repeated.
MinConstantReport min_constant(const SolutionView& view,
                               const MinConstantOptions& opts = {});

// ---------------------------------------------------------------------------
// Trace admissibility of computed fields

struct TraceMarginReport {
  double dx = 0.0;
  double worst_margin = 0.0;  ///< min BLN value over logged t > 0, both ends
  double worst_t = 0.0;
  Side worst_side = Side::left;
  double integrated_violation = 0.0;  ///< int max(0, -margin) dt
  double late_margin = 0.0;           ///< min over t >= sqrt(dx)
  int samples = 0;
};

TraceMarginReport trace_margins(const IBVPProblem& problem, const Field1D& field,
                                bool richardson = false);

// ---------------------------------------------------------------------------
// Commands

/// L1 distance between the coarse field and the fine field averaged onto
/// the coarse cells (final snapshot). Throws unless fine.cells = 2 coarse.
double self_convergence_distance(const Field1D& coarse, const Field1D& fine);

CommandResult cmd_solve(const ExperimentConfig& c, std::ostream& log);
CommandResult cmd_check_boundary(const ExperimentConfig& c, std::ostream& log);
CommandResult cmd_equivalence_sweep(const ExperimentConfig& c, std::ostream& log);
CommandResult cmd_min_constant(const ExperimentConfig& c, std::ostream& log);
CommandResult cmd_residuals(const ExperimentConfig& c, std::ostream& log);
CommandResult cmd_verify_pairs(const ExperimentConfig& c, std::ostream& log);

/// Closed-form candidate for residuals on exact fields: constants for
/// constant initial data, the advection profile for that preset.
SmoothCandidate exact_candidate(const ExperimentConfig& c);

}  // namespace ibvp

/// \file
/// First-order Godunov finite-volume solver for 1D balance laws on (a, b)
/// with ghost-cell boundary data, plus trace extraction and field IO.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ibvp/entropy_core.hpp"

namespace ibvp {

using SpaceFn = std::function<double(double x)>;
using TimeFn = std::function<double(double t)>;

struct IBVPProblem {
  FluxModel flux;  ///< N = 1
  SpaceFn u0;
  TimeFn ub_left;
  TimeFn ub_right;
  double a = 0.0;
  double b = 1.0;
  double T = 1.0;

  /// Throws Error on a < b, T > 0, N = 1 or missing data violations.
  void validate() const;
  /// sup of |u0| and |u_b| sampled on 257 points of each domain.
  double data_bound() const;
};

struct Grid1D {
  int cells = 200;
  double cfl = 0.45;
  double a = 0.0;
  double b = 1.0;

  double dx() const { return (b - a) / cells; }
  double center(int i) const { return a + (i + 0.5) * dx(); }
};

/// Grid on the problem's domain; throws Error when M < 4 or cfl not in (0,1].
Grid1D make_grid(const IBVPProblem& problem, int cells, double cfl = 0.45);

enum class Side { left, right };

struct Field1D {
  double a = 0.0;
  double b = 1.0;
  int cells = 0;
  double dx = 0.0;
  double T = 0.0;

  std::vector<double> times;                  ///< t_0 = 0 < t_1 < ... = T
  std::vector<std::vector<double>> snapshots;  ///< u^n, one per time
  /// Boundary-adjacent values per time at offsets (j - 1/2) dx, j = 1..J.
  std::vector<double> trace_offsets;
  std::vector<std::vector<double>> trace_left;
  std::vector<std::vector<double>> trace_right;

  // Run diagnostics.
  double max_conservation_defect = 0.0;  ///< relative, per step
  bool max_principle_checked = false;
  double max_principle_violation = 0.0;  ///< absolute overshoot, 0 if none
  double data_lo = 0.0;
  double data_hi = 0.0;

  double center(int i) const { return a + (i + 0.5) * dx; }
  int steps() const { return static_cast<int>(times.size()) - 1; }
  double dt(int n) const { return times[n + 1] - times[n]; }
};

struct SolveOptions {
  int trace_levels = 2;
  double blowup_factor = 1e3;
  long max_steps = 50'000'000;
};

/// Exact Riemann flux: min of f over [uL, uR] if uL <= uR, else max over
/// [uR, uL]. The end points count exactly.
double godunov_numflux(const FluxModel& flux, double t, double x, double uL,
                       double uR);

/// Forward Euler Godunov update, ghost cells at u_b(t_n), Lie-split
/// explicit Euler source. Throws Error on dt underflow or blow-up.
Field1D solve(const IBVPProblem& problem, const Grid1D& grid,
              const SolveOptions& opts = {});

struct TracePoint {
  double t = 0.0;
  double value = 0.0;
  double quality = 0.0;  ///< |value at offset 1 - value at offset 2|
};

/// First-cell value, or linear extrapolation from the first two offsets.
std::vector<TracePoint> extract_trace(const Field1D& field, Side side,
                                      bool richardson = false);

/// L1 distance between the last snapshot and `exact(T, x)` (midpoint rule).
double l1_error(const Field1D& field,
                const std::function<double(double, double)>& exact);

void write_field_csv(const Field1D& field, const std::string& path);
void write_trace_csv(const Field1D& field, const std::string& path);

/// Binary dump, little-endian:
///   char[8] "IBVPFLD1"; uint64 M; uint64 n_snapshots;
///   double a, b, dt (first step), T;
///   then per snapshot: double t followed by M doubles.
void write_field_binary(const Field1D& field, const std::string& path);
/// Reads the layout above; traces are rebuilt from the snapshots.
Field1D read_field_binary(const std::string& path);

}  // namespace ibvp

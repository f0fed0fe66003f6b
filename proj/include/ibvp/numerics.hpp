/// \file
/// Quadrature, low-discrepancy sampling and scalar optimisation helpers
/// shared by every module.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibvp {

/// Base error for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_intervals = 2000;
  /// When false, budget exhaustion returns the current estimate instead of
  /// throwing; the error estimate then exceeds the tolerance.
  bool throw_on_budget = true;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (G7/K15) integration of `g` over [lo, hi].
///
/// `breakpoints` (any order, values outside the range ignored) split the
/// range before adaptation starts; pass kinks of the integrand there.
/// Reversed limits return the negated integral. Throws QuadratureError when
/// the interval budget runs out before the tolerance is met (unless
/// opts.throw_on_budget is false) or the result is not finite.
QuadratureResult integrate(const std::function<double(double)>& g, double lo,
                           double hi, const QuadratureOptions& opts = {},
                           std::span<const double> breakpoints = {});

/// Convenience wrapper returning only the value.
double integrate_value(const std::function<double(double)>& g, double lo,
                       double hi, const QuadratureOptions& opts = {},
                       std::span<const double> breakpoints = {});

/// One non-adaptive K15 panel over [lo, hi]; `error` receives |K15 - G7|.
double kronrod_panel(const std::function<double(double)>& g, double lo,
                     double hi, double* error = nullptr);

/// Nodes of the 15-point Kronrod rule mapped to [lo, hi] and their weights.
void kronrod_nodes(double lo, double hi, std::vector<double>& nodes,
                   std::vector<double>& weights);

/// Radical-inverse Halton sequence in up to 8 dimensions.
class Halton {
 public:
  explicit Halton(int dims, std::uint64_t skip = 20);
  /// Next point in the unit cube.
  std::vector<double> next();
  int dims() const { return dims_; }

 private:
  int dims_;
  std::uint64_t index_;
};

/// Deterministic 64-bit mixer used to derive per-item seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a hash of a byte string.
std::uint64_t fnv1a(const std::string& bytes);

/// Maximum of `g` on [lo, hi]: uniform scan with `scan_points` samples then
/// golden-section refinement around the best sample. Endpoints always count.
struct Extremum {
  double arg = 0.0;
  double value = 0.0;
};
Extremum maximize(const std::function<double(double)>& g, double lo,
                  double hi, int scan_points = 33);
Extremum minimize(const std::function<double(double)>& g, double lo,
                  double hi, int scan_points = 33);

/// `count` uniformly spaced points on [lo, hi], both endpoints included
/// (a single point lo when count == 1 or lo == hi).
std::vector<double> linspace(double lo, double hi, int count);

/// Run `body(i)` for i in [0, n) on up to `threads` workers (0 = hardware).
/// Iterations must be independent; results are written by index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace ibvp

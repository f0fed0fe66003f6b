/// \file
/// Left-hand sides of the four integral definitions of entropy solution
/// evaluated on discrete fields or on smooth candidate solutions, the
/// boundary-limit estimator and the strong-solution verifier.
///
/// Integrals are taken over a SolutionView. GridView treats a Field1D as
/// piecewise constant on every space-time cell [t_n, t_n+1) x cell_i and
/// integrates the polynomial test functions exactly on each cell, with the
/// entropy integrand frozen at the cell centre. SmoothView integrates a
/// closed-form candidate with nested adaptive Gauss-Kronrod quadrature,
/// splitting at the test-function support and at the level sets u = k.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ibvp/entropy_core.hpp"
#include "ibvp/solver.hpp"

namespace ibvp {

// ---------------------------------------------------------------------------
// Test functions

/// B(s) = ((1 - s^2)^+)^3, C^2 with support [-1, 1] and integral 32/35.
double bump_profile(double s);
double bump_profile_prime(double s);
/// Antiderivative of B on [-1, s], clamped outside [-1, 1].
double bump_profile_integral(double s);

/// phi(t,x) = amplitude * B((t - t0)/rt) * B((x - x0)/rx).
class TestFunction {
 public:
  TestFunction(std::string id, double t0, double rt, double x0, double rx,
               double amplitude = 1.0);

  double phi(double t, double x) const;
  double dphi_dt(double t, double x) const;
  double dphi_dx(double t, double x) const;

  /// Exact integrals over [t_lo, t_hi] of the time factor and of its
  /// derivative (the latter is a difference of end values).
  double time_integral(double t_lo, double t_hi) const;
  double time_jump(double t_lo, double t_hi) const;
  double space_integral(double x_lo, double x_hi) const;
  double space_jump(double x_lo, double x_hi) const;
  double time_factor(double t) const;
  double space_factor(double x) const;

  double t_lo() const { return t0_ - rt_; }
  double t_hi() const { return t0_ + rt_; }
  double x_lo() const { return x0_ - rx_; }
  double x_hi() const { return x0_ + rx_; }
  double amplitude() const { return amplitude_; }
  const std::string& id() const { return id_; }

  /// Copy with the amplitude multiplied by `lambda`.
  TestFunction scaled(double lambda) const;

 private:
  std::string id_;
  double t0_, rt_, x0_, rx_, amplitude_;
};

struct SpaceTimeBox {
  double t_lo = 0.0;
  double t_hi = 1.0;
  double x_lo = 0.0;
  double x_hi = 1.0;
};

/// `count` bumps tiling `box` on a near-square lattice; each support is one
/// lattice cell. Throws Error for a degenerate box or count < 1.
std::vector<TestFunction> bump_family(const SpaceTimeBox& box, int count);

/// Bumps centred on the boundary point of `side`, half-width `rx`, tiling
/// the time window [t_lo, t_hi] with `count` supports.
std::vector<TestFunction> boundary_bumps(double xi, double t_lo, double t_hi,
                                         int count, double rx,
                                         const std::string& tag);

/// Interior lattice, initial-time bumps, boundary bumps at both ends and
/// the two corner bumps; every support ends before T.
std::vector<TestFunction> standard_test_functions(const IBVPProblem& problem);

// ---------------------------------------------------------------------------
// Solution views

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

/// Coefficients multiplying d_t phi, d_x phi and phi at a point.
struct InteriorTerms {
  double dt = 0.0;
  double dx = 0.0;
  double mass = 0.0;
};

struct InteriorIntegrand {
  std::function<InteriorTerms(double t, double x, double u)> eval;
  bool autonomous = false;       ///< eval independent of (t, x)
  std::vector<double> u_kinks;   ///< states where eval is not smooth
};

using InitialIntegrand = std::function<double(double x, double u)>;
using BoundaryIntegrand = std::function<double(double t, double ub, double tr)>;

class SolutionView {
 public:
  virtual ~SolutionView() = default;

  virtual const IBVPProblem& problem() const = 0;
  /// sup |u| over the view.
  virtual double sup_norm() const = 0;
  /// Mesh width used for the scheme slack; 0 for exact candidates.
  virtual double mesh_width() const = 0;

  virtual Integral interior(const TestFunction& phi,
                            const InteriorIntegrand& g) const = 0;
  /// int g(x, u_o(x)) phi(0, x) dx over the domain.
  virtual Integral initial(const TestFunction& phi, const InitialIntegrand& g,
                           const std::vector<double>& u_kinks) const = 0;
  /// int_0^T g(t, u_b(t), tr u(t)) phi(t, xi) dt at the end point of `side`.
  virtual Integral boundary(const TestFunction& phi, Side side,
                            const BoundaryIntegrand& g,
                            const std::vector<double>& u_kinks) const = 0;
  /// int g(x, u(T, x)) phi(T, x) dx.
  virtual Integral terminal(const TestFunction& phi, const InitialIntegrand& g,
                            const std::vector<double>& u_kinks) const = 0;
};

class GridView final : public SolutionView {
 public:
  /// Keeps references: `field` and `problem` must outlive the view.
  GridView(const Field1D& field, const IBVPProblem& problem,
           bool richardson_trace = false);

  const IBVPProblem& problem() const override { return problem_; }
  double sup_norm() const override;
  double mesh_width() const override { return field_.dx; }
  Integral interior(const TestFunction& phi,
                    const InteriorIntegrand& g) const override;
  Integral initial(const TestFunction& phi, const InitialIntegrand& g,
                   const std::vector<double>& u_kinks) const override;
  Integral boundary(const TestFunction& phi, Side side,
                    const BoundaryIntegrand& g,
                    const std::vector<double>& u_kinks) const override;
  Integral terminal(const TestFunction& phi, const InitialIntegrand& g,
                    const std::vector<double>& u_kinks) const override;

 private:
  const Field1D& field_;
  const IBVPProblem& problem_;
  std::vector<TracePoint> trace_left_, trace_right_;
};

/// Closed-form candidate u(t,x) with its first derivatives.
struct SmoothCandidate {
  std::string name;
  std::function<double(double, double)> u;
  std::function<double(double, double)> du_dt;
  std::function<double(double, double)> du_dx;
};

class SmoothView final : public SolutionView {
 public:
  SmoothView(SmoothCandidate candidate, const IBVPProblem& problem);

  const IBVPProblem& problem() const override { return problem_; }
  double sup_norm() const override;
  double mesh_width() const override { return 0.0; }
  Integral interior(const TestFunction& phi,
                    const InteriorIntegrand& g) const override;
  Integral initial(const TestFunction& phi, const InitialIntegrand& g,
                   const std::vector<double>& u_kinks) const override;
  Integral boundary(const TestFunction& phi, Side side,
                    const BoundaryIntegrand& g,
                    const std::vector<double>& u_kinks) const override;
  Integral terminal(const TestFunction& phi, const InitialIntegrand& g,
                    const std::vector<double>& u_kinks) const override;

 private:
  SmoothCandidate candidate_;
  const IBVPProblem& problem_;
};

// ---------------------------------------------------------------------------
// Residuals

enum class Definition { re, mv_plus, mv_minus, e, bln };
std::string_view to_string(Definition d);

struct ResidualOptions {
  double tolerance = 1e-9;
  double slack_coeff = 0.0;  ///< verdict threshold -(tolerance + slack * dx)
  bool terminal = false;     ///< add -int H(u(T,.), k) phi(T,.) (RE only)
};

struct ResidualReport {
  Definition definition = Definition::re;
  std::string entropy;
  double k = 0.0;
  std::string test_function;
  double lhs = 0.0;
  double quadrature_error = 0.0;
  double threshold = 0.0;
  bool passed = true;
};

ResidualReport residual_mv(const SolutionView& view, double k, Sign sign,
                           const TestFunction& phi, double L,
                           const ResidualOptions& opts = {});
ResidualReport residual_re(const SolutionView& view,
                           const BoundaryEntropyPair& pair, double k,
                           const TestFunction& phi, double L,
                           const ResidualOptions& opts = {});
ResidualReport residual_bln(const SolutionView& view, double k,
                            const TestFunction& phi,
                            const ResidualOptions& opts = {});
ResidualReport residual_e(const SolutionView& view, const EntropyPair& pair,
                          const TestFunction& phi,
                          const ResidualOptions& opts = {});

/// Constant multiplying the boundary term for k-sweeps: Lipschitz norm over
/// the hull of the k values and the data range [-U, U].
double boundary_constant(const SolutionView& view, const std::vector<double>& ks);

/// Uniform k grid on [-U-1, U+1] with `count` points, U = view sup norm.
std::vector<double> definition_k_grid(const SolutionView& view, int count = 33);

struct SweepSummary {
  std::vector<ResidualReport> reports;
  double min_lhs = 0.0;
  std::size_t worst = 0;  ///< index of the smallest lhs
  bool passed() const;
  /// Throws Error on an empty summary.
  const ResidualReport& worst_report() const;
};

struct DefinitionSweepOptions {
  std::vector<double> ks;  ///< empty: definition_k_grid(view)
  std::vector<TestFunction> test_functions;  ///< empty: standard family
  int pair_index = 100;  ///< n for smoothed and smooth-abs entropies
  std::optional<double> constant;  ///< replaces the boundary constant
  ResidualOptions residual;
};

/// Evaluates one definition over the (k, test function, entropy) sweep.
/// RE uses smoothed semi pairs of both signs; E uses smooth |u - k| and
/// quadratic entropies. Throws Error when no test function is given and
/// the standard family is empty.
SweepSummary definition_sweep(const SolutionView& view, Definition def,
                              const DefinitionSweepOptions& opts = {});

void write_residual_csv(const SweepSummary& summary, const std::string& path);
/// k x test function grid of lhs values (minimum over entropies): one row per
/// k, one column per test function id.
void write_residual_surface(const SweepSummary& summary, const std::string& path);
std::string residual_summary_json(const SweepSummary& summary);

// ---------------------------------------------------------------------------
// Boundary limit

using BoundaryWeight = std::function<double(double t, Side side)>;

struct BoundaryLimitReport {
  std::vector<double> offsets;
  std::vector<double> values;  ///< one per offset
  double extrapolated = 0.0;   ///< linear extrapolation to offset 0
  double tolerance = 1e-9;
  bool passed = true;
};

/// int int Q(t, xi, u(t, xi - rho nu), u_b) . nu beta over both end points.
BoundaryLimitReport boundary_limit_check(const Field1D& field,
                                         const IBVPProblem& problem,
                                         const BoundaryEntropyPair& pair,
                                         const BoundaryWeight& beta);
/// Same with the flux comparison function F(., ., u, u_b, k) . nu.
BoundaryLimitReport boundary_limit_check(const Field1D& field,
                                         const IBVPProblem& problem, double k,
                                         const BoundaryWeight& beta);

/// Piecewise-constant field holding `value` on `steps` uniform steps.
Field1D constant_field(const IBVPProblem& problem, int cells, int steps,
                       double value);
/// Field sampled from a closed-form candidate at cell centres.
Field1D sampled_field(const IBVPProblem& problem, const SmoothCandidate& c,
                      int cells, int steps);

// ---------------------------------------------------------------------------
// Strong solutions

struct StrongReport {
  double pde_residual = 0.0;
  double initial_mismatch = 0.0;
  double boundary_margin = 0.0;  ///< worst strong boundary condition value
  bool boundary_admissible = true;
  double re_min_lhs = 0.0;
  int re_evaluations = 0;
  double tolerance = 1e-8;
  bool pde_ok = false;
  bool initial_ok = false;
  bool re_ok = false;
  bool passed() const { return pde_ok && initial_ok && boundary_admissible && re_ok; }
};

/// Pointwise PDE residual, initial data and strong boundary condition on
/// sample grids, then the RE residual on the candidate over smoothed semi
/// pairs of both signs, a k grid and the standard test functions.
StrongReport verify_strong(const SmoothCandidate& candidate,
                           const IBVPProblem& problem, double tol = 1e-8);

}  // namespace ibvp

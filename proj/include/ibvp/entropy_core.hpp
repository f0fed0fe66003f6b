/// \file
/// Flux and source models, the sign/interval helpers, entropy pairs and
/// boundary entropy pairs, plus numerical verifiers of their defining
/// properties.
///
/// Every constructor here is pure: the returned objects only capture values
/// and are safe to share across threads.

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ibvp/numerics.hpp"

namespace ibvp {

inline constexpr int kMaxDim = 3;

/// Point or vector in R^N, N <= kMaxDim; unused trailing entries stay 0.
using SpaceVec = std::array<double, kMaxDim>;

inline SpaceVec point1(double x) { return {x, 0.0, 0.0}; }

inline double dot(const SpaceVec& a, const SpaceVec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm2(const SpaceVec& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Signs and intervals

/// Two-sided sign with sgn(0) = 0.
inline double sgn(double s) { return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0); }
inline double sgn_plus(double s) { return s > 0.0 ? 1.0 : 0.0; }
inline double sgn_minus(double s) { return s < 0.0 ? -1.0 : 0.0; }
inline double pos_part(double s) { return s > 0.0 ? s : 0.0; }
inline double neg_part(double s) { return s < 0.0 ? -s : 0.0; }

enum class Sign { plus, minus };

inline double semi_part(Sign sign, double s) {
  return sign == Sign::plus ? pos_part(s) : neg_part(s);
}
inline double semi_sgn(Sign sign, double s) {
  return sign == Sign::plus ? sgn_plus(s) : sgn_minus(s);
}
std::string_view to_string(Sign sign);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double z) const { return lo <= z && z <= hi; }
  double width() const { return hi - lo; }
};

/// Closed interval with end points w and k.
inline Interval interval_hull(double w, double k) {
  return {std::min(w, k), std::max(w, k)};
}

/// z belongs to the closed interval between w and k, tested as
/// (w - z)(z - k) >= 0.
inline bool in_hull(double z, double w, double k) {
  return (w - z) * (z - k) >= 0.0;
}

// ---------------------------------------------------------------------------
// Flux model

using VecFn = std::function<SpaceVec(double t, const SpaceVec& x, double u)>;
using ScalarFn = std::function<double(double t, const SpaceVec& x, double u)>;

enum class DerivativeMode { analytic, finite_difference };

/// Raw closures describing f(t,x,u) in R^N and the source F(t,x,u).
/// Empty derivative closures are replaced by central differences.
struct FluxDefinition {
  std::string name;
  int dim = 1;
  VecFn f;
  VecFn df_du;
  ScalarFn div_f;      ///< spatial divergence at frozen u; empty means 0
  ScalarFn ddiv_f_du;  ///< d/du of div_f; empty means finite differences
  ScalarFn source;     ///< F; empty means 0
  ScalarFn dsource_du;
  bool autonomous = false;  ///< f, F independent of (t, x)
  bool has_divergence = false;
};

/// Box [t_lo, t_hi] x [x_lo, x_hi] x [-u_bound, u_bound] used for sampling.
struct SampleBox {
  double t_lo = 0.0;
  double t_hi = 1.0;
  SpaceVec x_lo{0.0, 0.0, 0.0};
  SpaceVec x_hi{1.0, 0.0, 0.0};
  double u_bound = 2.0;
};

class FluxModel {
 public:
  FluxModel() = default;
  /// Registers the model and runs the derivative consistency self-check on
  /// `box`; throws Error when a supplied derivative disagrees with central
  /// differences or an evaluation is not finite.
  explicit FluxModel(FluxDefinition def, const SampleBox& box = {});

  SpaceVec f(double t, const SpaceVec& x, double u) const { return def_.f(t, x, u); }
  SpaceVec df_du(double t, const SpaceVec& x, double u) const;
  double div_f(double t, const SpaceVec& x, double u) const;
  double ddiv_f_du(double t, const SpaceVec& x, double u) const;
  double source(double t, const SpaceVec& x, double u) const;
  double dsource_du(double t, const SpaceVec& x, double u) const;

  // Scalar shortcuts for N = 1.
  double f1(double t, double x, double u) const { return def_.f(t, point1(x), u)[0]; }
  double df1(double t, double x, double u) const { return df_du(t, point1(x), u)[0]; }

  int dim() const { return def_.dim; }
  const std::string& name() const { return def_.name; }
  bool autonomous() const { return def_.autonomous; }
  bool has_source() const { return static_cast<bool>(def_.source); }
  DerivativeMode derivative_mode() const { return mode_; }
  /// Largest relative mismatch between df_du and a central difference
  /// observed by the registration self-check.
  double consistency_error() const { return consistency_error_; }
  const FluxDefinition& definition() const { return def_; }

 private:
  FluxDefinition def_;
  DerivativeMode mode_ = DerivativeMode::analytic;
  double consistency_error_ = 0.0;
};

/// Central-difference step used by the derivative fallback.
inline double fd_step(double u) { return std::max(1e-6, 1e-6 * std::abs(u)); }

/// Catalog lookup: "burgers", "linear:<a>", "buckley-leverett",
/// "nonautonomous-demo". Throws Error for unknown names.
FluxModel make_flux(std::string_view spec);
std::vector<std::string> flux_catalog();

/// Copy of `flux` with the linear source F(t,x,u) = rate * u added.
FluxModel with_linear_source(const FluxModel& flux, double rate);

/// sup of |df/du| (Euclidean norm over components) on [0,T] x box x [-U,U];
/// the tensor sample grid is refined until two successive refinements agree
/// within relative 1e-3, then the best sample is polished in u.
double lipschitz_norm(const FluxModel& flux, double horizon,
                      const SampleBox& space_box, double u_bound);

// ---------------------------------------------------------------------------
// Entropy pairs

/// Classical entropy-entropy flux pair (eta convex, d_u q = eta' d_u f).
struct EntropyPair {
  std::string label;
  std::function<double(double)> eta;
  std::function<double(double)> eta_prime;
  VecFn q;
  ScalarFn div_q;
  std::vector<double> kinks;  ///< points where eta is not C^2
};

/// Boundary entropy-entropy flux pair (H, Q) in the (z, w) variables.
struct BoundaryEntropyPair {
  std::string label;
  std::function<double(double z, double w)> H;
  std::function<double(double z, double w)> dH_dz;
  std::function<SpaceVec(double t, const SpaceVec& x, double z, double w)> Q;
  std::function<double(double t, const SpaceVec& x, double z, double w)> div_Q;
  /// Kinks of z -> dH_dz(z, w); used as quadrature breakpoints.
  std::function<std::vector<double>(double w)> kinks;
};

/// Options for entropy-flux antiderivatives.
inline QuadratureOptions pair_quadrature() { return {1e-10, 1e-8, 4000}; }

/// Generic pair: q(u) = int_anchor^u eta'(s) d_u f(s) ds by quadrature.
EntropyPair entropy_pair_from_eta(const FluxModel& flux, std::string label,
                                  std::function<double(double)> eta,
                                  std::function<double(double)> eta_prime,
                                  double anchor, std::vector<double> kinks = {});

/// Generic boundary pair: Q(z,w) = int_w^z dH_dz(s,w) d_u f(s) ds.
BoundaryEntropyPair boundary_pair_from_H(
    const FluxModel& flux, std::string label,
    std::function<double(double, double)> H,
    std::function<double(double, double)> dH_dz,
    std::function<std::vector<double>(double)> kinks = {});

/// |u - k| with q = sgn(u-k)(f(u) - f(k)), closed form.
EntropyPair kruzkov_pair(const FluxModel& flux, double k);
/// Same entropy, flux obtained by quadrature of sgn(s-k) d_u f(s).
EntropyPair kruzkov_pair_quadrature(const FluxModel& flux, double k);
/// (u - k)^{+/-} with q = sgn^{+/-}(u-k)(f(u) - f(k)).
EntropyPair semi_kruzkov_pair(const FluxModel& flux, double k, Sign sign);
/// (u - k)^2 with its flux by quadrature.
EntropyPair quadratic_pair(const FluxModel& flux, double k);
/// sqrt((z-k)^2 + 1/n), flux by quadrature anchored at k.
EntropyPair smooth_abs_family(const FluxModel& flux, double k, int n);

/// H_n(z,w) = sqrt(((z-w)^{+/-})^2 + 1/n^2) - 1/n with Q by quadrature.
/// Evaluated at w = k this is the smoothing of the semi-Kruzkov pair at k.
BoundaryEntropyPair smoothed_semi_pair(const FluxModel& flux, Sign sign, int n);

/// Distance of u to the interval between w and k.
double hull_distance(double u, double w, double k);
/// H_n^k(u,w) = sqrt(Delta^k(u,w)^2 + 1/n^2) - 1/n, Q by quadrature.
BoundaryEntropyPair distance_pair_family(const FluxModel& flux, double k, int n);
/// Limit pair (Delta^k, int_w^u d_1 Delta^k d_u f); Q is computed by
/// quadrature, independently of the closed form of the flux comparison.
BoundaryEntropyPair distance_pair_limit(const FluxModel& flux, double k);

/// Six-case pair (H~, Q~) built from an entropy pair with eta(k) = 0.
BoundaryEntropyPair shifted_pair_limit(const EntropyPair& base,
                                       const FluxModel& flux, double k);
/// Clipped pair H_n mollified with the unit-mass C-infinity bump of radius
/// 1/n, Q~_n by quadrature. Throws Error when |eta(k)| > 1e-12.
BoundaryEntropyPair shifted_pair_family(const EntropyPair& base,
                                        const FluxModel& flux, double k, int n);

/// Standard bump exp(-1/(1-s^2)) on (-1,1) normalised to unit mass.
double mollifier(double s);

// ---------------------------------------------------------------------------
// Property verification

struct PropertyCheck {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct PropertyReport {
  std::string subject;
  int samples = 0;
  std::vector<PropertyCheck> checks;

  bool passed() const;
  /// Throws Error when no check carries that name.
  const PropertyCheck& check(std::string_view name) const;
};

PropertyReport verify_flux(const FluxModel& flux, int samples,
                           const SampleBox& box = {});
PropertyReport verify_entropy_pair(const EntropyPair& pair,
                                   const FluxModel& flux, int samples = 1000,
                                   const SampleBox& box = {});
PropertyReport verify_boundary_pair(const BoundaryEntropyPair& pair,
                                    const FluxModel& flux, int samples = 1000,
                                    const SampleBox& box = {});

}  // namespace ibvp

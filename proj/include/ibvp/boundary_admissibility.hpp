/// \file
/// The flux comparison function in its three closed forms, the pointwise
/// boundary admissibility checkers and the brute-force equivalence sweep.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibvp/entropy_core.hpp"

namespace ibvp {

enum class FluxForm { piecewise, sign_average, semi_sign };

/// F(t,x,z,w,k): flux difference that vanishes for z between w and k.
SpaceVec flux_comparison(const FluxModel& flux, double t, const SpaceVec& x,
                         double z, double w, double k,
                         FluxForm form = FluxForm::piecewise);

/// Everything a pointwise admissibility check consumes.
struct BoundarySample {
  double t = 0.0;
  SpaceVec xi{0.0, 0.0, 0.0};
  SpaceVec nu{1.0, 0.0, 0.0};  ///< unit outward normal
  double trace_u = 0.0;
  double datum_ub = 0.0;

  /// Throws Error unless |nu| = 1 within 1e-12 and all fields are finite.
  void validate() const;
};

enum class Condition {
  bln,
  sign_form,
  flux_comparison,
  dubois_lefloch,
  zero_entropy,
  strong_bc
};
std::string_view to_string(Condition c);

/// The five conditions compared by the equivalence sweep, in report order.
inline constexpr std::array<Condition, 5> kSweepConditions = {
    Condition::bln, Condition::sign_form, Condition::flux_comparison,
    Condition::dubois_lefloch, Condition::zero_entropy};

struct AdmissibilityReport {
  Condition condition = Condition::bln;
  bool admissible = true;
  std::optional<double> worst_k;
  double worst_value = 0.0;  ///< most negative left-hand side found
  std::string worst_witness;  ///< entropy label for pair-based checks
  int k_grid_size = 0;
  double tolerance = 0.0;
};

struct CheckOptions {
  int hull_points = 257;    ///< uniform points on I[tr u, u_b], ends included
  int outside_points = 32;  ///< zero-checks split evenly below and above
  double tol_rel = 1e-9;    ///< threshold -tol_rel * (1 + |f| scale)
};

/// Shared k grid: hull points first, then the outside points.
std::vector<double> admissibility_k_grid(double trace_u, double datum_ub,
                                         const CheckOptions& opts = {});

/// Threshold used by every checker on this sample.
double admissibility_tolerance(const BoundarySample& s, const FluxModel& flux,
                               const CheckOptions& opts = {});

AdmissibilityReport check_bln(const BoundarySample& s, const FluxModel& flux,
                              const CheckOptions& opts = {});
/// Strong form: trace_u is read as the solution's boundary value.
AdmissibilityReport check_strong_bc(const BoundarySample& s,
                                    const FluxModel& flux,
                                    const CheckOptions& opts = {});
AdmissibilityReport check_sign_form(const BoundarySample& s,
                                    const FluxModel& flux,
                                    std::span<const double> ks,
                                    const CheckOptions& opts = {});
AdmissibilityReport check_flux_comparison(const BoundarySample& s,
                                          const FluxModel& flux,
                                          std::span<const double> ks,
                                          const CheckOptions& opts = {});
AdmissibilityReport check_dubois_lefloch(const BoundarySample& s,
                                         const FluxModel& flux,
                                         std::span<const EntropyPair> pairs,
                                         const CheckOptions& opts = {});
AdmissibilityReport check_zero_entropy(const BoundarySample& s,
                                       const FluxModel& flux,
                                       std::span<const double> ks,
                                       const CheckOptions& opts = {});

/// Convenience overloads on the uniform grid k_lo..k_hi (`count` points)
/// merged with the hull end points.
AdmissibilityReport check_sign_form(const BoundarySample& s,
                                    const FluxModel& flux, double k_lo,
                                    double k_hi, int count,
                                    const CheckOptions& opts = {});
AdmissibilityReport check_flux_comparison(const BoundarySample& s,
                                          const FluxModel& flux, double k_lo,
                                          double k_hi, int count,
                                          const CheckOptions& opts = {});

/// Entropy family witnessing the Dubois-LeFloch inequality on a sample:
/// exact Kruzkov pairs on the hull grid, smooth absolute values
/// (n = 10, 100) on a coarser hull grid and quadratics.
std::vector<EntropyPair> dubois_lefloch_family(const FluxModel& flux,
                                               const BoundarySample& s,
                                               const CheckOptions& opts = {});

/// Runs the five sweep conditions on one sample with the shared grid.
std::array<AdmissibilityReport, 5> check_all(const BoundarySample& s,
                                             const FluxModel& flux,
                                             const CheckOptions& opts = {});

// ---------------------------------------------------------------------------
// Equivalence sweep

struct SweepOptions {
  int samples = 10000;
  std::uint64_t seed = 1;
  double u_bound = 2.0;
  SampleBox box;  ///< t and xi ranges
  CheckOptions check;
  unsigned threads = 0;
  /// Test fixture: negate the margins of one condition.
  std::optional<Condition> fault;
};

struct SweepRecord {
  std::size_t index = 0;
  BoundarySample sample;
  std::array<bool, 5> admissible{};
  std::array<double, 5> margin{};
  bool agree() const;
};

struct SweepReport {
  std::string flux;
  std::uint64_t seed = 0;
  int samples = 0;
  int k_grid = 0;
  int admissible_count = 0;
  std::vector<SweepRecord> records;  ///< every sample, by index
  std::vector<std::size_t> disagreements;
  std::array<double, 5> worst_margin{};

  std::string to_json() const;
  /// One row per sample with the five verdicts and margins.
  void write_csv(const std::string& path) const;
};

/// Deterministic sample generator: sample i depends only on (seed, i).
BoundarySample sweep_sample(const FluxModel& flux, const SweepOptions& opts,
                            std::size_t index);

SweepReport equivalence_sweep(const FluxModel& flux, const SweepOptions& opts);

}  // namespace ibvp

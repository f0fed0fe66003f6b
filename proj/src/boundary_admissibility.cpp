#include "ibvp/boundary_admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace ibvp {

namespace {

SpaceVec diff(const SpaceVec& a, const SpaceVec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

SpaceVec scaled(double s, const SpaceVec& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

SpaceVec sum(const SpaceVec& a, const SpaceVec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

}  // namespace

SpaceVec flux_comparison(const FluxModel& flux, double t, const SpaceVec& x,
                         double z, double w, double k, FluxForm form) {
  auto f = [&](double u) { return flux.f(t, x, u); };
  switch (form) {
    case FluxForm::piecewise:
      if (z <= w && w <= k) return diff(f(w), f(z));
      if (w <= z && z <= k) return {0.0, 0.0, 0.0};
      if (w <= k && k <= z) return diff(f(z), f(k));
      if (z <= k && k <= w) return diff(f(k), f(z));
      if (k <= z && z <= w) return {0.0, 0.0, 0.0};
      return diff(f(z), f(w));
    case FluxForm::sign_average: {
      // Sign coefficients are collected per flux value first, so they cancel
      // exactly on the hull instead of leaving a rounding residue.
      const double szw = sgn(z - w), skw = sgn(k - w), szk = sgn(z - k);
      const double cz = 0.5 * (szw + szk);
      const double cw = 0.5 * (skw - szw);
      const double ck = -0.5 * (skw + szk);
      SpaceVec acc{0.0, 0.0, 0.0};
      if (cz != 0.0) acc = sum(acc, scaled(cz, f(z)));
      if (cw != 0.0) acc = sum(acc, scaled(cw, f(w)));
      if (ck != 0.0) acc = sum(acc, scaled(ck, f(k)));
      return acc;
    }
    case FluxForm::semi_sign: {
      const double hi = std::max(w, k);
      const double lo = std::min(w, k);
      const SpaceVec fz = f(z);
      SpaceVec acc{0.0, 0.0, 0.0};
      if (const double s = sgn_plus(z - hi); s != 0.0) {
        acc = sum(acc, scaled(s, diff(fz, f(hi))));
      }
      if (const double s = sgn_minus(z - lo); s != 0.0) {
        acc = sum(acc, scaled(s, diff(fz, f(lo))));
      }
      return acc;
    }
  }
  throw Error("flux_comparison: unknown form");
}

void BoundarySample::validate() const {
  const bool finite = std::isfinite(t) && std::isfinite(trace_u) &&
                      std::isfinite(datum_ub) &&
                      std::all_of(xi.begin(), xi.end(),
                                  [](double v) { return std::isfinite(v); }) &&
                      std::all_of(nu.begin(), nu.end(),
                                  [](double v) { return std::isfinite(v); });
  if (!finite) throw Error("BoundarySample: non-finite field");
  if (std::abs(norm2(nu) - 1.0) > 1e-12) {
    throw Error("BoundarySample: normal is not a unit vector");
  }
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::bln: return "bln";
    case Condition::sign_form: return "sign-form";
    case Condition::flux_comparison: return "flux-comparison";
    case Condition::dubois_lefloch: return "dubois-lefloch";
    case Condition::zero_entropy: return "zero-entropy";
    case Condition::strong_bc: return "strong-bc";
  }
  return "?";
}

std::vector<double> admissibility_k_grid(double trace_u, double datum_ub,
                                         const CheckOptions& opts) {
  if (opts.hull_points < 2) throw Error("k grid needs at least 2 hull points");
  const double lo = std::min(trace_u, datum_ub);
  const double hi = std::max(trace_u, datum_ub);
  std::vector<double> ks = linspace(lo, hi, opts.hull_points);
  if (ks.size() == 1) ks.assign(opts.hull_points, lo);
  const int below = opts.outside_points / 2;
  const int above = opts.outside_points - below;
  const double span = std::max(1.0, hi - lo);
  for (int j = 1; j <= below; ++j) ks.push_back(lo - span * j / below);
  for (int j = 1; j <= above; ++j) ks.push_back(hi + span * j / above);
  return ks;
}

double admissibility_tolerance(const BoundarySample& s, const FluxModel& flux,
                               const CheckOptions& opts) {
  const double scale = std::max(norm2(flux.f(s.t, s.xi, s.trace_u)),
                                norm2(flux.f(s.t, s.xi, s.datum_ub)));
  return opts.tol_rel * (1.0 + scale);
}

namespace {

// Running minimum over k of a left-hand side.
struct Scan {
  AdmissibilityReport r;
  Scan(Condition c, double tol, int size) {
    r.condition = c;
    r.tolerance = tol;
    r.k_grid_size = size;
    r.worst_value = std::numeric_limits<double>::infinity();
  }
  void add(double lhs, std::optional<double> k, const std::string* who = nullptr) {
    if (lhs < r.worst_value) {
      r.worst_value = lhs;
      r.worst_k = k;
      if (who != nullptr) r.worst_witness = *who;
    }
  }
  AdmissibilityReport done() {
    if (!std::isfinite(r.worst_value)) r.worst_value = 0.0;
    r.admissible = !(r.worst_value < -r.tolerance);
    return r;
  }
};

std::vector<double> merged_grid(const BoundarySample& s, double k_lo,
                                double k_hi, int count) {
  if (count < 2) throw Error("k grid needs at least 2 points");
  std::vector<double> ks = linspace(k_lo, k_hi, count);
  ks.push_back(s.trace_u);
  ks.push_back(s.datum_ub);
  return ks;
}

AdmissibilityReport bln_like(Condition c, const BoundarySample& s,
                             const FluxModel& flux, const CheckOptions& opts) {
  s.validate();
  const auto all = admissibility_k_grid(s.trace_u, s.datum_ub, opts);
  const std::span<const double> hull(all.data(), opts.hull_points);
  Scan scan(c, admissibility_tolerance(s, flux, opts),
            static_cast<int>(hull.size()));
  const double sign = sgn(s.trace_u - s.datum_ub);
  const SpaceVec ftr = flux.f(s.t, s.xi, s.trace_u);
  for (double k : hull) {
    const double lhs =
        sign == 0.0 ? 0.0 : sign * dot(diff(ftr, flux.f(s.t, s.xi, k)), s.nu);
    scan.add(lhs, k);
  }
  return scan.done();
}

}  // namespace

AdmissibilityReport check_bln(const BoundarySample& s, const FluxModel& flux,
                              const CheckOptions& opts) {
  return bln_like(Condition::bln, s, flux, opts);
}

AdmissibilityReport check_strong_bc(const BoundarySample& s,
                                    const FluxModel& flux,
                                    const CheckOptions& opts) {
  return bln_like(Condition::strong_bc, s, flux, opts);
}

AdmissibilityReport check_sign_form(const BoundarySample& s,
                                    const FluxModel& flux,
                                    std::span<const double> ks,
                                    const CheckOptions& opts) {
  s.validate();
  Scan scan(Condition::sign_form, admissibility_tolerance(s, flux, opts),
            static_cast<int>(ks.size()));
  const SpaceVec ftr = flux.f(s.t, s.xi, s.trace_u);
  for (double k : ks) {
    const double jump = sgn(s.trace_u - k) - sgn(s.datum_ub - k);
    const double lhs =
        jump == 0.0 ? 0.0 : jump * dot(diff(ftr, flux.f(s.t, s.xi, k)), s.nu);
    scan.add(lhs, k);
  }
  return scan.done();
}

AdmissibilityReport check_flux_comparison(const BoundarySample& s,
                                          const FluxModel& flux,
                                          std::span<const double> ks,
                                          const CheckOptions& opts) {
  s.validate();
  Scan scan(Condition::flux_comparison, admissibility_tolerance(s, flux, opts),
            static_cast<int>(ks.size()));
  for (double k : ks) {
    scan.add(dot(flux_comparison(flux, s.t, s.xi, s.trace_u, s.datum_ub, k),
                 s.nu),
             k);
  }
  return scan.done();
}

AdmissibilityReport check_sign_form(const BoundarySample& s,
                                    const FluxModel& flux, double k_lo,
                                    double k_hi, int count,
                                    const CheckOptions& opts) {
  const auto ks = merged_grid(s, k_lo, k_hi, count);
  return check_sign_form(s, flux, ks, opts);
}

AdmissibilityReport check_flux_comparison(const BoundarySample& s,
                                          const FluxModel& flux, double k_lo,
                                          double k_hi, int count,
                                          const CheckOptions& opts) {
  const auto ks = merged_grid(s, k_lo, k_hi, count);
  return check_flux_comparison(s, flux, ks, opts);
}

AdmissibilityReport check_dubois_lefloch(const BoundarySample& s,
                                         const FluxModel& flux,
                                         std::span<const EntropyPair> pairs,
                                         const CheckOptions& opts) {
  s.validate();
  if (pairs.empty()) throw Error("check_dubois_lefloch: empty entropy family");
  Scan scan(Condition::dubois_lefloch, admissibility_tolerance(s, flux, opts),
            static_cast<int>(pairs.size()));
  const SpaceVec ftr = flux.f(s.t, s.xi, s.trace_u);
  const SpaceVec fub = flux.f(s.t, s.xi, s.datum_ub);
  for (const auto& p : pairs) {
    const SpaceVec dq =
        diff(p.q(s.t, s.xi, s.trace_u), p.q(s.t, s.xi, s.datum_ub));
    const SpaceVec v = diff(dq, scaled(p.eta_prime(s.datum_ub), diff(ftr, fub)));
    scan.add(dot(v, s.nu), std::nullopt, &p.label);
  }
  return scan.done();
}

AdmissibilityReport check_zero_entropy(const BoundarySample& s,
                                       const FluxModel& flux,
                                       std::span<const double> ks,
                                       const CheckOptions& opts) {
  s.validate();
  Scan scan(Condition::zero_entropy, admissibility_tolerance(s, flux, opts),
            static_cast<int>(ks.size()));
  for (double k : ks) {
    // eta = Delta^k(., u_b) vanishes with its derivative at u_b; its flux
    // anchored at u_b comes from quadrature.
    const auto pair = distance_pair_limit(flux, k);
    const SpaceVec q = pair.Q(s.t, s.xi, s.trace_u, s.datum_ub);
    scan.add(dot(q, s.nu), k);
  }
  return scan.done();
}

std::vector<EntropyPair> dubois_lefloch_family(const FluxModel& flux,
                                               const BoundarySample& s,
                                               const CheckOptions& opts) {
  std::vector<EntropyPair> family;
  const auto hull =
      linspace(std::min(s.trace_u, s.datum_ub),
               std::max(s.trace_u, s.datum_ub), opts.hull_points);
  for (double k : hull) family.push_back(kruzkov_pair_quadrature(flux, k));
  const auto coarse = linspace(std::min(s.trace_u, s.datum_ub),
                               std::max(s.trace_u, s.datum_ub), 17);
  for (int n : {10, 100}) {
    for (double k : coarse) family.push_back(smooth_abs_family(flux, k, n));
  }
  for (double k : {s.trace_u, 0.5 * (s.trace_u + s.datum_ub), s.datum_ub}) {
    family.push_back(quadratic_pair(flux, k));
  }
  return family;
}

std::array<AdmissibilityReport, 5> check_all(const BoundarySample& s,
                                             const FluxModel& flux,
                                             const CheckOptions& opts) {
  const auto ks = admissibility_k_grid(s.trace_u, s.datum_ub, opts);
  const auto family = dubois_lefloch_family(flux, s, opts);
  return {check_bln(s, flux, opts), check_sign_form(s, flux, ks, opts),
          check_flux_comparison(s, flux, ks, opts),
          check_dubois_lefloch(s, flux, family, opts),
          check_zero_entropy(s, flux, ks, opts)};
}

// ---------------------------------------------------------------------------
// Sweep

bool SweepRecord::agree() const {
  return std::all_of(admissible.begin(), admissible.end(),
                     [&](bool a) { return a == admissible[0]; });
}

namespace {

class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::size_t index)
      : state_(splitmix64(seed ^ splitmix64(index + 0x51ed2701ULL))) {}
  double uniform() {
    state_ = splitmix64(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace

BoundarySample sweep_sample(const FluxModel& flux, const SweepOptions& opts,
                            std::size_t index) {
  SampleStream rng(opts.seed, index);
  BoundarySample s;
  s.t = rng.uniform(opts.box.t_lo, opts.box.t_hi);
  for (int d = 0; d < flux.dim(); ++d) {
    s.xi[d] = rng.uniform(opts.box.x_lo[d], opts.box.x_hi[d]);
  }
  s.trace_u = rng.uniform(-opts.u_bound, opts.u_bound);
  s.datum_ub = rng.uniform(-opts.u_bound, opts.u_bound);
  if (flux.dim() == 1) {
    s.nu = {rng.uniform() < 0.5 ? -1.0 : 1.0, 0.0, 0.0};
  } else {
    SpaceVec v{0.0, 0.0, 0.0};
    double r = 0.0;
    do {
      for (int d = 0; d < flux.dim(); ++d) v[d] = rng.uniform(-1.0, 1.0);
      r = norm2(v);
    } while (r > 1.0 || r < 1e-3);
    s.nu = scaled(1.0 / r, v);
  }
  return s;
}

SweepReport equivalence_sweep(const FluxModel& flux, const SweepOptions& opts) {
  if (opts.samples < 1) throw Error("equivalence_sweep: samples must be >= 1");
  SweepReport report;
  report.flux = flux.name();
  report.seed = opts.seed;
  report.samples = opts.samples;
  report.k_grid = opts.check.hull_points + opts.check.outside_points;
  report.records.resize(opts.samples);

  parallel_for(
      opts.samples,
      [&](std::size_t i) {
        SweepRecord rec;
        rec.index = i;
        rec.sample = sweep_sample(flux, opts, i);
        const auto reports = check_all(rec.sample, flux, opts.check);
        for (std::size_t c = 0; c < reports.size(); ++c) {
          double m = reports[c].worst_value;
          if (opts.fault && *opts.fault == kSweepConditions[c]) m = -m;
          rec.margin[c] = m;
          rec.admissible[c] = !(m < -reports[c].tolerance);
        }
        report.records[i] = rec;
      },
      opts.threads);

  report.worst_margin.fill(std::numeric_limits<double>::infinity());
  for (const auto& rec : report.records) {
    if (!rec.agree()) report.disagreements.push_back(rec.index);
    if (rec.admissible[0]) ++report.admissible_count;
    for (std::size_t c = 0; c < 5; ++c) {
      report.worst_margin[c] = std::min(report.worst_margin[c], rec.margin[c]);
    }
  }
  return report;
}

namespace {

nlohmann::ordered_json record_json(const SweepRecord& r) {
  nlohmann::ordered_json j;
  j["index"] = r.index;
  j["t"] = r.sample.t;
  j["xi"] = r.sample.xi;
  j["nu"] = r.sample.nu;
  j["trace"] = r.sample.trace_u;
  j["datum"] = r.sample.datum_ub;
  for (std::size_t c = 0; c < 5; ++c) {
    const std::string name(to_string(kSweepConditions[c]));
    j["verdicts"][name] = r.admissible[c] ? "admissible" : "violated";
    j["margins"][name] = r.margin[c];
  }
  return j;
}

}  // namespace

std::string SweepReport::to_json() const {
  nlohmann::ordered_json j;
  j["flux"] = flux;
  j["seed"] = seed;
  j["samples"] = samples;
  j["k_grid"] = k_grid;
  j["admissible"] = admissible_count;
  j["disagreements"] = nlohmann::ordered_json::array();
  for (std::size_t i : disagreements) {
    j["disagreements"].push_back(record_json(records[i]));
  }
  for (std::size_t c = 0; c < 5; ++c) {
    j["worst_margins"][std::string(to_string(kSweepConditions[c]))] =
        worst_margin[c];
  }
  return j.dump(2);
}

void SweepReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(17);
  out << "index,t,xi,nu,trace,datum";
  for (Condition c : kSweepConditions) {
    out << ',' << to_string(c) << ',' << to_string(c) << "_margin";
  }
  out << ",agree\n";
  for (const auto& r : records) {
    out << r.index << ',' << r.sample.t << ',' << r.sample.xi[0] << ','
        << r.sample.nu[0] << ',' << r.sample.trace_u << ','
        << r.sample.datum_ub;
    for (std::size_t c = 0; c < 5; ++c) {
      out << ',' << (r.admissible[c] ? 1 : 0) << ',' << r.margin[c];
    }
    out << ',' << (r.agree() ? 1 : 0) << '\n';
  }
}

}  // namespace ibvp

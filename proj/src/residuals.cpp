#include "ibvp/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "ibvp/boundary_admissibility.hpp"

namespace ibvp {

// ---------------------------------------------------------------------------
// Test functions

double bump_profile(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return w * w * w;
}

double bump_profile_prime(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return -6.0 * s * w * w;
}

double bump_profile_integral(double s) {
  s = std::clamp(s, -1.0, 1.0);
  const double s2 = s * s;
  // s - s^3 + 3 s^5/5 - s^7/7, shifted so the value at -1 is 0.
  const double p = s * (1.0 + s2 * (-1.0 + s2 * (0.6 - s2 / 7.0)));
  return p + 16.0 / 35.0;
}

TestFunction::TestFunction(std::string id, double t0, double rt, double x0,
                           double rx, double amplitude)
    : id_(std::move(id)), t0_(t0), rt_(rt), x0_(x0), rx_(rx),
      amplitude_(amplitude) {
  if (!(rt > 0.0) || !(rx > 0.0)) {
    throw Error("TestFunction '" + id_ + "': radii must be positive");
  }
}

double TestFunction::time_factor(double t) const {
  return amplitude_ * bump_profile((t - t0_) / rt_);
}

double TestFunction::space_factor(double x) const {
  return bump_profile((x - x0_) / rx_);
}

double TestFunction::phi(double t, double x) const {
  return time_factor(t) * space_factor(x);
}

double TestFunction::dphi_dt(double t, double x) const {
  return amplitude_ * bump_profile_prime((t - t0_) / rt_) / rt_ * space_factor(x);
}

double TestFunction::dphi_dx(double t, double x) const {
  return time_factor(t) * bump_profile_prime((x - x0_) / rx_) / rx_;
}

double TestFunction::time_integral(double t_lo, double t_hi) const {
  return amplitude_ * rt_ *
         (bump_profile_integral((t_hi - t0_) / rt_) -
          bump_profile_integral((t_lo - t0_) / rt_));
}

double TestFunction::time_jump(double t_lo, double t_hi) const {
  return time_factor(t_hi) - time_factor(t_lo);
}

double TestFunction::space_integral(double x_lo, double x_hi) const {
  return rx_ * (bump_profile_integral((x_hi - x0_) / rx_) -
                bump_profile_integral((x_lo - x0_) / rx_));
}

double TestFunction::space_jump(double x_lo, double x_hi) const {
  return space_factor(x_hi) - space_factor(x_lo);
}

TestFunction TestFunction::scaled(double lambda) const {
  TestFunction copy = *this;
  copy.amplitude_ *= lambda;
  return copy;
}

std::vector<TestFunction> bump_family(const SpaceTimeBox& box, int count) {
  const double wt = box.t_hi - box.t_lo;
  const double wx = box.x_hi - box.x_lo;
  if (count < 1 || !(wt > 0.0) || !(wx > 0.0)) {
    throw Error("bump_family: degenerate box or count < 1");
  }
  const int nx = static_cast<int>(std::ceil(std::sqrt(count * wx / wt)));
  const int cols = std::clamp(nx, 1, count);
  const int rows = (count + cols - 1) / cols;
  const double ht = wt / rows, hx = wx / cols;
  std::vector<TestFunction> out;
  for (int r = 0; r < rows && static_cast<int>(out.size()) < count; ++r) {
    for (int c = 0; c < cols && static_cast<int>(out.size()) < count; ++c) {
      out.emplace_back("interior-" + std::to_string(out.size()),
                       box.t_lo + (r + 0.5) * ht, 0.5 * ht,
                       box.x_lo + (c + 0.5) * hx, 0.5 * hx);
    }
  }
  return out;
}

std::vector<TestFunction> boundary_bumps(double xi, double t_lo, double t_hi,
                                         int count, double rx,
                                         const std::string& tag) {
  if (count < 1 || !(t_hi > t_lo)) {
    throw Error("boundary_bumps: empty time window or count < 1");
  }
  const double h = (t_hi - t_lo) / count;
  std::vector<TestFunction> out;
  for (int j = 0; j < count; ++j) {
    out.emplace_back(tag + "-" + std::to_string(j), t_lo + (j + 0.5) * h,
                     0.5 * h, xi, rx);
  }
  return out;
}

std::vector<TestFunction> standard_test_functions(const IBVPProblem& problem) {
  const double T = problem.T, a = problem.a, b = problem.b, L = b - a;
  auto out = bump_family({0.1 * T, 0.9 * T, a + 0.1 * L, b - 0.1 * L}, 9);
  for (int j = 1; j <= 3; ++j) {
    out.emplace_back("initial-" + std::to_string(j - 1), 0.0, 0.3 * T,
                     a + 0.25 * j * L, 0.25 * L);
  }
  for (auto& f : boundary_bumps(a, 0.1 * T, 0.9 * T, 3, 0.2 * L, "left")) {
    out.push_back(std::move(f));
  }
  for (auto& f : boundary_bumps(b, 0.1 * T, 0.9 * T, 3, 0.2 * L, "right")) {
    out.push_back(std::move(f));
  }
  out.emplace_back("corner-left", 0.0, 0.4 * T, a, 0.25 * L);
  out.emplace_back("corner-right", 0.0, 0.4 * T, b, 0.25 * L);
  return out;
}

// ---------------------------------------------------------------------------
// Views

namespace {

double boundary_point(const IBVPProblem& p, Side side) {
  return side == Side::left ? p.a : p.b;
}

double outward_normal(Side side) { return side == Side::left ? -1.0 : 1.0; }

double boundary_datum(const IBVPProblem& p, Side side, double t) {
  return side == Side::left ? p.ub_left(t) : p.ub_right(t);
}

}  // namespace

GridView::GridView(const Field1D& field, const IBVPProblem& problem,
                   bool richardson_trace)
    : field_(field), problem_(problem) {
  if (field.steps() < 1 || field.cells < 1) throw Error("GridView: empty field");
  trace_left_ = extract_trace(field, Side::left, richardson_trace);
  trace_right_ = extract_trace(field, Side::right, richardson_trace);
}

double GridView::sup_norm() const {
  double m = problem_.data_bound();
  for (const auto& snap : field_.snapshots) {
    for (double v : snap) m = std::max(m, std::abs(v));
  }
  return m;
}

namespace {

struct Range {
  int lo = 0;
  int hi = 0;  // exclusive
};

// Steps n with [t_n, t_n+1] meeting (lo, hi).
Range step_range(const Field1D& f, double lo, double hi) {
  const auto& ts = f.times;
  auto it = std::upper_bound(ts.begin(), ts.end(), lo);
  int first = std::max(0, static_cast<int>(it - ts.begin()) - 1);
  int last = first;
  while (last < f.steps() && ts[last] < hi) ++last;
  return {first, last};
}

Range cell_range(const Field1D& f, double lo, double hi) {
  const int first = std::max(0, static_cast<int>(std::floor((lo - f.a) / f.dx)));
  const int last =
      std::min(f.cells, static_cast<int>(std::ceil((hi - f.a) / f.dx)));
  return {first, std::max(first, last)};
}

}  // namespace

Integral GridView::interior(const TestFunction& phi,
                            const InteriorIntegrand& g) const {
  const Range steps = step_range(field_, phi.t_lo(), phi.t_hi());
  const Range cells = cell_range(field_, phi.x_lo(), phi.x_hi());
  if (steps.lo >= steps.hi || cells.lo >= cells.hi) return {};
  const int nc = cells.hi - cells.lo;
  std::vector<double> s_int(nc), s_jump(nc);
  for (int c = 0; c < nc; ++c) {
    const double xl = field_.a + (cells.lo + c) * field_.dx;
    const double xr = xl + field_.dx;
    s_int[c] = phi.space_integral(xl, xr);
    s_jump[c] = phi.space_jump(xl, xr);
  }
  double sum = 0.0;
  double last_u = std::numeric_limits<double>::quiet_NaN();
  InteriorTerms last{};
  for (int n = steps.lo; n < steps.hi; ++n) {
    const double t0 = field_.times[n], t1 = field_.times[n + 1];
    const double t_int = phi.time_integral(t0, t1);
    const double t_jump = phi.time_jump(t0, t1);
    if (t_int == 0.0 && t_jump == 0.0) continue;
    const double tm = 0.5 * (t0 + t1);
    const auto& u = field_.snapshots[n];
    for (int c = 0; c < nc; ++c) {
      const int i = cells.lo + c;
      InteriorTerms G;
      if (g.autonomous && u[i] == last_u) {
        G = last;
      } else {
        G = g.eval(tm, field_.center(i), u[i]);
        last = G;
        last_u = u[i];
      }
      sum += G.dt * t_jump * s_int[c] + G.dx * t_int * s_jump[c] +
             G.mass * t_int * s_int[c];
    }
  }
  return {sum, 0.0};
}

namespace {

Integral snapshot_term(const Field1D& f, const std::vector<double>& u,
                       double phi_t, const TestFunction& phi,
                       const InitialIntegrand& g) {
  if (phi_t == 0.0) return {};
  const Range cells = cell_range(f, phi.x_lo(), phi.x_hi());
  double sum = 0.0;
  for (int i = cells.lo; i < cells.hi; ++i) {
    const double xl = f.a + i * f.dx;
    sum += g(f.center(i), u[i]) * phi.space_integral(xl, xl + f.dx);
  }
  return {sum * phi_t, 0.0};
}

}  // namespace

Integral GridView::initial(const TestFunction& phi, const InitialIntegrand& g,
                           const std::vector<double>&) const {
  return snapshot_term(field_, field_.snapshots.front(), phi.time_factor(0.0),
                       phi, g);
}

Integral GridView::terminal(const TestFunction& phi, const InitialIntegrand& g,
                            const std::vector<double>&) const {
  return snapshot_term(field_, field_.snapshots.back(),
                       phi.time_factor(field_.times.back()), phi, g);
}

Integral GridView::boundary(const TestFunction& phi, Side side,
                            const BoundaryIntegrand& g,
                            const std::vector<double>&) const {
  const double xi = boundary_point(problem_, side);
  const double sf = phi.space_factor(xi);
  if (sf == 0.0) return {};
  const auto& trace = side == Side::left ? trace_left_ : trace_right_;
  const Range steps = step_range(field_, phi.t_lo(), phi.t_hi());
  double sum = 0.0;
  for (int n = steps.lo; n < steps.hi; ++n) {
    const double t0 = field_.times[n], t1 = field_.times[n + 1];
    const double w = phi.time_integral(t0, t1);
    if (w == 0.0) continue;
    sum += g(t0, boundary_datum(problem_, side, t0), trace[n].value) * w;
  }
  return {sum * sf, 0.0};
}

// Smooth candidates -----------------------------------------------------------

namespace {

const QuadratureOptions kOuter{1e-12, 1e-10, 300, false};
const QuadratureOptions kInner{1e-13, 1e-11, 300, false};

// Points of [lo, hi] where fn crosses one of the kink levels, located by a
// uniform scan and bisection.
std::vector<double> level_crossings(const std::function<double(double)>& fn,
                                    double lo, double hi,
                                    const std::vector<double>& levels) {
  std::vector<double> out;
  if (levels.empty() || !(hi > lo)) return out;
  constexpr int kScan = 64;
  std::vector<double> xs(kScan + 1), vs(kScan + 1);
  for (int j = 0; j <= kScan; ++j) {
    xs[j] = lo + (hi - lo) * j / kScan;
    vs[j] = fn(xs[j]);
  }
  for (double level : levels) {
    for (int j = 0; j < kScan; ++j) {
      const double d0 = vs[j] - level, d1 = vs[j + 1] - level;
      if (d0 == 0.0) {
        out.push_back(xs[j]);
        continue;
      }
      if (d0 * d1 >= 0.0) continue;
      double l = xs[j], r = xs[j + 1], dl = d0;
      for (int it = 0; it < 80 && r - l > 1e-15 * (1.0 + std::abs(l)); ++it) {
        const double m = 0.5 * (l + r);
        const double dm = fn(m) - level;
        if ((dm < 0.0) == (dl < 0.0)) {
          l = m;
          dl = dm;
        } else {
          r = m;
        }
      }
      out.push_back(0.5 * (l + r));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SmoothView::SmoothView(SmoothCandidate candidate, const IBVPProblem& problem)
    : candidate_(std::move(candidate)), problem_(problem) {
  if (!candidate_.u) throw Error("SmoothView: candidate has no u");
}

double SmoothView::sup_norm() const {
  double m = problem_.data_bound();
  for (double t : linspace(0.0, problem_.T, 65)) {
    for (double x : linspace(problem_.a, problem_.b, 65)) {
      m = std::max(m, std::abs(candidate_.u(t, x)));
    }
  }
  return m;
}

Integral SmoothView::interior(const TestFunction& phi,
                              const InteriorIntegrand& g) const {
  const double tl = std::max(0.0, phi.t_lo()), th = std::min(problem_.T, phi.t_hi());
  const double xl = std::max(problem_.a, phi.x_lo());
  const double xh = std::min(problem_.b, phi.x_hi());
  if (!(th > tl) || !(xh > xl)) return {};
  double inner_err = 0.0;
  auto slice = [&](double t) {
    const auto u_of_x = [&](double x) { return candidate_.u(t, x); };
    const auto cuts = level_crossings(u_of_x, xl, xh, g.u_kinks);
    const auto r = integrate(
        [&](double x) {
          const InteriorTerms G = g.eval(t, x, candidate_.u(t, x));
          return G.dt * phi.dphi_dt(t, x) + G.dx * phi.dphi_dx(t, x) +
                 G.mass * phi.phi(t, x);
        },
        xl, xh, kInner, cuts);
    inner_err = std::max(inner_err, r.error_estimate);
    return r.value;
  };
  const auto r = integrate(slice, tl, th, kOuter);
  return {r.value, r.error_estimate + inner_err * (th - tl)};
}

Integral SmoothView::initial(const TestFunction& phi, const InitialIntegrand& g,
                             const std::vector<double>& u_kinks) const {
  const double pt = phi.time_factor(0.0);
  const double xl = std::max(problem_.a, phi.x_lo());
  const double xh = std::min(problem_.b, phi.x_hi());
  if (pt == 0.0 || !(xh > xl)) return {};
  const auto cuts = level_crossings(problem_.u0, xl, xh, u_kinks);
  const auto r = integrate(
      [&](double x) { return g(x, problem_.u0(x)) * phi.space_factor(x); }, xl,
      xh, kOuter, cuts);
  return {r.value * pt, r.error_estimate * std::abs(pt)};
}

Integral SmoothView::terminal(const TestFunction& phi, const InitialIntegrand& g,
                              const std::vector<double>& u_kinks) const {
  const double T = problem_.T;
  const double pt = phi.time_factor(T);
  const double xl = std::max(problem_.a, phi.x_lo());
  const double xh = std::min(problem_.b, phi.x_hi());
  if (pt == 0.0 || !(xh > xl)) return {};
  const auto uT = [&](double x) { return candidate_.u(T, x); };
  const auto cuts = level_crossings(uT, xl, xh, u_kinks);
  const auto r = integrate(
      [&](double x) { return g(x, uT(x)) * phi.space_factor(x); }, xl, xh,
      kOuter, cuts);
  return {r.value * pt, r.error_estimate * std::abs(pt)};
}

Integral SmoothView::boundary(const TestFunction& phi, Side side,
                              const BoundaryIntegrand& g,
                              const std::vector<double>& u_kinks) const {
  const double xi = boundary_point(problem_, side);
  const double sf = phi.space_factor(xi);
  const double tl = std::max(0.0, phi.t_lo()), th = std::min(problem_.T, phi.t_hi());
  if (sf == 0.0 || !(th > tl)) return {};
  const auto ub = [&](double t) { return boundary_datum(problem_, side, t); };
  const auto tr = [&](double t) { return candidate_.u(t, xi); };
  auto cuts = level_crossings(ub, tl, th, u_kinks);
  const auto more = level_crossings(tr, tl, th, u_kinks);
  cuts.insert(cuts.end(), more.begin(), more.end());
  const auto r = integrate(
      [&](double t) { return g(t, ub(t), tr(t)) * phi.time_factor(t); }, tl, th,
      kOuter, cuts);
  return {r.value * sf, r.error_estimate * std::abs(sf)};
}

// ---------------------------------------------------------------------------
// Residuals

std::string_view to_string(Definition d) {
  switch (d) {
    case Definition::re: return "RE";
    case Definition::mv_plus: return "MV+";
    case Definition::mv_minus: return "MV-";
    case Definition::e: return "E";
    case Definition::bln: return "BLN";
  }
  return "?";
}

namespace {

struct Accumulator {
  double value = 0.0;
  double error = 0.0;
  void add(const Integral& i) {
    value += i.value;
    error += i.error;
  }
};

ResidualReport finish(Definition def, std::string entropy, double k,
                      const TestFunction& phi, const Accumulator& acc,
                      const SolutionView& view, const ResidualOptions& opts) {
  ResidualReport r;
  r.definition = def;
  r.entropy = std::move(entropy);
  r.k = k;
  r.test_function = phi.id();
  r.lhs = acc.value;
  r.quadrature_error = acc.error;
  r.threshold = opts.tolerance + opts.slack_coeff * view.mesh_width();
  r.passed = r.lhs >= -r.threshold;
  return r;
}

}  // namespace

ResidualReport residual_mv(const SolutionView& view, double k, Sign sign,
                           const TestFunction& phi, double L,
                           const ResidualOptions& opts) {
  const FluxModel& flux = view.problem().flux;
  InteriorIntegrand g;
  g.autonomous = flux.autonomous();
  g.u_kinks = {k};
  g.eval = [&](double t, double x, double u) {
    const SpaceVec p = point1(x);
    const double s = semi_sgn(sign, u - k);
    if (s == 0.0) return InteriorTerms{};
    return InteriorTerms{semi_part(sign, u - k),
                         s * (flux.f(t, p, u)[0] - flux.f(t, p, k)[0]),
                         s * (flux.source(t, p, u) - flux.div_f(t, p, k))};
  };
  Accumulator acc;
  acc.add(view.interior(phi, g));
  acc.add(view.initial(
      phi, [&](double, double u) { return semi_part(sign, u - k); }, {k}));
  for (Side side : {Side::left, Side::right}) {
    acc.add(view.boundary(
        phi, side,
        [&](double, double ub, double) { return L * semi_part(sign, ub - k); },
        {k}));
  }
  return finish(sign == Sign::plus ? Definition::mv_plus : Definition::mv_minus,
                std::string(sign == Sign::plus ? "(u-k)+" : "(u-k)-"), k, phi,
                acc, view, opts);
}

ResidualReport residual_re(const SolutionView& view,
                           const BoundaryEntropyPair& pair, double k,
                           const TestFunction& phi, double L,
                           const ResidualOptions& opts) {
  const FluxModel& flux = view.problem().flux;
  const std::vector<double> kinks = pair.kinks ? pair.kinks(k) : std::vector<double>{};
  InteriorIntegrand g;
  g.autonomous = flux.autonomous();
  g.u_kinks = kinks;
  g.eval = [&](double t, double x, double u) {
    const SpaceVec p = point1(x);
    const double dH = pair.dH_dz(u, k);
    return InteriorTerms{
        pair.H(u, k), pair.Q(t, p, u, k)[0],
        dH * (flux.source(t, p, u) - flux.div_f(t, p, u)) + pair.div_Q(t, p, u, k)};
  };
  Accumulator acc;
  acc.add(view.interior(phi, g));
  const InitialIntegrand h = [&](double, double u) { return pair.H(u, k); };
  acc.add(view.initial(phi, h, kinks));
  for (Side side : {Side::left, Side::right}) {
    acc.add(view.boundary(
        phi, side, [&](double, double ub, double) { return L * pair.H(ub, k); },
        kinks));
  }
  if (opts.terminal) {
    const Integral term = view.terminal(phi, h, kinks);
    acc.add({-term.value, term.error});
  }
  return finish(Definition::re, pair.label, k, phi, acc, view, opts);
}

ResidualReport residual_bln(const SolutionView& view, double k,
                            const TestFunction& phi,
                            const ResidualOptions& opts) {
  const FluxModel& flux = view.problem().flux;
  InteriorIntegrand g;
  g.autonomous = flux.autonomous();
  g.u_kinks = {k};
  g.eval = [&](double t, double x, double u) {
    const SpaceVec p = point1(x);
    const double s = sgn(u - k);
    if (s == 0.0) return InteriorTerms{};
    return InteriorTerms{std::abs(u - k),
                         s * (flux.f(t, p, u)[0] - flux.f(t, p, k)[0]),
                         s * (flux.source(t, p, u) - flux.div_f(t, p, k))};
  };
  Accumulator acc;
  acc.add(view.interior(phi, g));
  acc.add(view.initial(
      phi, [&](double, double u) { return std::abs(u - k); }, {k}));
  for (Side side : {Side::left, Side::right}) {
    const double xi = boundary_point(view.problem(), side);
    const double nu = outward_normal(side);
    acc.add(view.boundary(
        phi, side,
        [&, xi, nu](double t, double ub, double tr) {
          return -nu * sgn(ub - k) * (flux.f1(t, xi, tr) - flux.f1(t, xi, k));
        },
        {k}));
  }
  return finish(Definition::bln, "|u-k|", k, phi, acc, view, opts);
}

ResidualReport residual_e(const SolutionView& view, const EntropyPair& pair,
                          const TestFunction& phi,
                          const ResidualOptions& opts) {
  const FluxModel& flux = view.problem().flux;
  InteriorIntegrand g;
  g.autonomous = flux.autonomous();
  g.u_kinks = pair.kinks;
  g.eval = [&](double t, double x, double u) {
    const SpaceVec p = point1(x);
    const double dq = pair.div_q ? pair.div_q(t, p, u) : 0.0;
    return InteriorTerms{
        pair.eta(u), pair.q(t, p, u)[0],
        pair.eta_prime(u) * (flux.source(t, p, u) - flux.div_f(t, p, u)) + dq};
  };
  Accumulator acc;
  acc.add(view.interior(phi, g));
  acc.add(view.initial(
      phi, [&](double, double u) { return pair.eta(u); }, pair.kinks));
  for (Side side : {Side::left, Side::right}) {
    const double xi = boundary_point(view.problem(), side);
    const double nu = outward_normal(side);
    acc.add(view.boundary(
        phi, side,
        [&, xi, nu](double t, double ub, double tr) {
          const SpaceVec p = point1(xi);
          return nu * (-pair.q(t, p, ub)[0] +
                       pair.eta_prime(ub) * (flux.f1(t, xi, ub) - flux.f1(t, xi, tr)));
        },
        pair.kinks));
  }
  return finish(Definition::e, pair.label, 0.0, phi, acc, view, opts);
}

double boundary_constant(const SolutionView& view, const std::vector<double>& ks) {
  double U = view.sup_norm();
  for (double k : ks) U = std::max(U, std::abs(k));
  const IBVPProblem& p = view.problem();
  SampleBox box;
  box.t_lo = 0.0;
  box.t_hi = p.T;
  box.x_lo = point1(p.a);
  box.x_hi = point1(p.b);
  box.u_bound = U;
  return lipschitz_norm(p.flux, p.T, box, U);
}

std::vector<double> definition_k_grid(const SolutionView& view, int count) {
  const double U = view.sup_norm();
  return linspace(-U - 1.0, U + 1.0, count);
}

bool SweepSummary::passed() const {
  return std::all_of(reports.begin(), reports.end(),
                     [](const ResidualReport& r) { return r.passed; });
}

const ResidualReport& SweepSummary::worst_report() const {
  if (reports.empty()) throw Error("SweepSummary: no reports");
  return reports.at(worst);
}

SweepSummary definition_sweep(const SolutionView& view, Definition def,
                              const DefinitionSweepOptions& opts) {
  const IBVPProblem& problem = view.problem();
  const auto ks = opts.ks.empty() ? definition_k_grid(view) : opts.ks;
  const auto phis = opts.test_functions.empty()
                        ? standard_test_functions(problem)
                        : opts.test_functions;
  if (phis.empty()) throw Error("definition_sweep: no test functions");
  const bool needs_L = def == Definition::re || def == Definition::mv_plus ||
                       def == Definition::mv_minus;
  const double L = needs_L ? opts.constant.value_or(boundary_constant(view, ks))
                           : 0.0;
  const FluxModel& flux = problem.flux;
  const int n = opts.pair_index;
  std::vector<BoundaryEntropyPair> semi;
  if (def == Definition::re) {
    semi = {smoothed_semi_pair(flux, Sign::plus, n),
            smoothed_semi_pair(flux, Sign::minus, n)};
  }

  const std::size_t jobs = ks.size() * phis.size();
  std::vector<std::vector<ResidualReport>> out(jobs);
  parallel_for(jobs, [&](std::size_t j) {
    const double k = ks[j / phis.size()];
    const TestFunction& phi = phis[j % phis.size()];
    auto& dst = out[j];
    switch (def) {
      case Definition::re:
        for (const auto& pair : semi) {
          dst.push_back(residual_re(view, pair, k, phi, L, opts.residual));
        }
        break;
      case Definition::mv_plus:
        dst.push_back(residual_mv(view, k, Sign::plus, phi, L, opts.residual));
        break;
      case Definition::mv_minus:
        dst.push_back(residual_mv(view, k, Sign::minus, phi, L, opts.residual));
        break;
      case Definition::e:
        for (const auto& pair :
             {smooth_abs_family(flux, k, n), quadratic_pair(flux, k)}) {
          auto r = residual_e(view, pair, phi, opts.residual);
          r.k = k;
          dst.push_back(std::move(r));
        }
        break;
      case Definition::bln:
        dst.push_back(residual_bln(view, k, phi, opts.residual));
        break;
    }
  });

  SweepSummary summary;
  for (auto& v : out) {
    for (auto& r : v) summary.reports.push_back(std::move(r));
  }
  summary.min_lhs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < summary.reports.size(); ++i) {
    if (summary.reports[i].lhs < summary.min_lhs) {
      summary.min_lhs = summary.reports[i].lhs;
      summary.worst = i;
    }
  }
  return summary;
}

void write_residual_csv(const SweepSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(17);
  out << "definition,entropy,k,test_function,lhs,quadrature_error,threshold,"
         "passed\n";
  for (const auto& r : summary.reports) {
    out << to_string(r.definition) << ",\"" << r.entropy << "\"," << r.k << ','
        << r.test_function << ',' << r.lhs << ',' << r.quadrature_error << ','
        << r.threshold << ',' << (r.passed ? 1 : 0) << '\n';
  }
}

void write_residual_surface(const SweepSummary& summary, const std::string& path) {
  std::vector<double> ks;
  std::vector<std::string> ids;
  for (const auto& r : summary.reports) {
    if (std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
    if (std::find(ids.begin(), ids.end(), r.test_function) == ids.end()) {
      ids.push_back(r.test_function);
    }
  }
  std::sort(ks.begin(), ks.end());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> grid(ks.size(), std::vector<double>(ids.size(), inf));
  for (const auto& r : summary.reports) {
    const auto i = std::find(ks.begin(), ks.end(), r.k) - ks.begin();
    const auto j = std::find(ids.begin(), ids.end(), r.test_function) - ids.begin();
    grid[i][j] = std::min(grid[i][j], r.lhs);
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(17);
  out << 'k';
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out << ks[i];
    for (double v : grid[i]) out << ',' << v;
    out << '\n';
  }
}

std::string residual_summary_json(const SweepSummary& summary) {
  nlohmann::ordered_json j;
  j["evaluations"] = summary.reports.size();
  j["passed"] = summary.passed();
  j["min_lhs"] = summary.min_lhs;
  if (!summary.reports.empty()) {
    const auto& w = summary.worst_report();
    j["definition"] = std::string(to_string(w.definition));
    j["worst"] = {{"entropy", w.entropy},
                  {"k", w.k},
                  {"test_function", w.test_function},
                  {"lhs", w.lhs},
                  {"quadrature_error", w.quadrature_error},
                  {"threshold", w.threshold}};
  }
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Boundary limit

namespace {

BoundaryLimitReport limit_check(
    const Field1D& field, const IBVPProblem& problem, const BoundaryWeight& beta,
    const std::function<double(double t, double xi, double z, double w)>& qnu) {
  if (field.trace_offsets.size() < 2) {
    throw Error("boundary_limit_check: need two trace offsets");
  }
  BoundaryLimitReport rep;
  rep.offsets = field.trace_offsets;
  for (std::size_t j = 0; j < field.trace_offsets.size(); ++j) {
    double sum = 0.0;
    for (Side side : {Side::left, Side::right}) {
      const auto& log = side == Side::left ? field.trace_left : field.trace_right;
      const double xi = boundary_point(problem, side);
      const double nu = outward_normal(side);
      for (int n = 0; n < field.steps(); ++n) {
        const double t = field.times[n];
        const double w = beta(t, side);
        if (w == 0.0) continue;
        sum += nu * qnu(t, xi, log[n][j], boundary_datum(problem, side, t)) * w *
               field.dt(n);
      }
    }
    rep.values.push_back(sum);
  }
  const double r1 = rep.offsets[0], r2 = rep.offsets[1];
  rep.extrapolated =
      rep.values[0] + (rep.values[0] - rep.values[1]) * r1 / (r2 - r1);
  rep.passed = rep.extrapolated >= -rep.tolerance;
  return rep;
}

}  // namespace

BoundaryLimitReport boundary_limit_check(const Field1D& field,
                                         const IBVPProblem& problem,
                                         const BoundaryEntropyPair& pair,
                                         const BoundaryWeight& beta) {
  return limit_check(field, problem, beta,
                     [&](double t, double xi, double z, double w) {
                       return pair.Q(t, point1(xi), z, w)[0];
                     });
}

BoundaryLimitReport boundary_limit_check(const Field1D& field,
                                         const IBVPProblem& problem, double k,
                                         const BoundaryWeight& beta) {
  return limit_check(field, problem, beta,
                     [&](double t, double xi, double z, double w) {
                       return flux_comparison(problem.flux, t, point1(xi), z, w,
                                              k)[0];
                     });
}

namespace {

Field1D empty_field(const IBVPProblem& problem, int cells, int steps) {
  if (cells < 2 || steps < 1) throw Error("field: need >= 2 cells and >= 1 step");
  Field1D f;
  f.a = problem.a;
  f.b = problem.b;
  f.cells = cells;
  f.dx = (problem.b - problem.a) / cells;
  f.T = problem.T;
  f.times = linspace(0.0, problem.T, steps + 1);
  f.times.back() = problem.T;
  f.trace_offsets = {0.5 * f.dx, 1.5 * f.dx};
  return f;
}

void push_snapshot(Field1D& f, std::vector<double> u) {
  f.trace_left.push_back({u[0], u[1]});
  f.trace_right.push_back({u[f.cells - 1], u[f.cells - 2]});
  f.snapshots.push_back(std::move(u));
}

}  // namespace

Field1D constant_field(const IBVPProblem& problem, int cells, int steps,
                       double value) {
  Field1D f = empty_field(problem, cells, steps);
  for (std::size_t n = 0; n < f.times.size(); ++n) {
    push_snapshot(f, std::vector<double>(cells, value));
  }
  f.data_lo = f.data_hi = value;
  return f;
}

Field1D sampled_field(const IBVPProblem& problem, const SmoothCandidate& c,
                      int cells, int steps) {
  Field1D f = empty_field(problem, cells, steps);
  for (double t : f.times) {
    std::vector<double> u(cells);
    for (int i = 0; i < cells; ++i) u[i] = c.u(t, f.center(i));
    push_snapshot(f, std::move(u));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Strong solutions

StrongReport verify_strong(const SmoothCandidate& candidate,
                           const IBVPProblem& problem, double tol) {
  problem.validate();
  if (!candidate.u || !candidate.du_dt || !candidate.du_dx) {
    throw Error("verify_strong: candidate needs u and both derivatives");
  }
  const FluxModel& flux = problem.flux;
  StrongReport rep;
  rep.tolerance = tol;

  for (double t : linspace(0.0, problem.T, 41)) {
    for (double x : linspace(problem.a, problem.b, 41)) {
      const SpaceVec p = point1(x);
      const double u = candidate.u(t, x);
      const double r = candidate.du_dt(t, x) +
                       flux.df_du(t, p, u)[0] * candidate.du_dx(t, x) +
                       flux.div_f(t, p, u) - flux.source(t, p, u);
      rep.pde_residual = std::max(rep.pde_residual, std::abs(r));
    }
  }
  rep.pde_ok = rep.pde_residual <= tol;

  for (double x : linspace(problem.a, problem.b, 257)) {
    rep.initial_mismatch = std::max(
        rep.initial_mismatch, std::abs(candidate.u(0.0, x) - problem.u0(x)));
  }
  rep.initial_ok = rep.initial_mismatch <= tol;

  rep.boundary_margin = std::numeric_limits<double>::infinity();
  for (Side side : {Side::left, Side::right}) {
    const double xi = boundary_point(problem, side);
    for (double t : linspace(0.0, problem.T, 65)) {
      BoundarySample s;
      s.t = t;
      s.xi = point1(xi);
      s.nu = point1(outward_normal(side));
      s.trace_u = candidate.u(t, xi);
      s.datum_ub = boundary_datum(problem, side, t);
      const auto r = check_strong_bc(s, flux);
      rep.boundary_admissible = rep.boundary_admissible && r.admissible;
      rep.boundary_margin = std::min(rep.boundary_margin, r.worst_value);
    }
  }

  const SmoothView view(candidate, problem);
  DefinitionSweepOptions opts;
  opts.ks = definition_k_grid(view, 9);
  opts.residual.tolerance = tol;
  const auto sweep = definition_sweep(view, Definition::re, opts);
  rep.re_min_lhs = sweep.min_lhs;
  rep.re_evaluations = static_cast<int>(sweep.reports.size());
  rep.re_ok = sweep.passed();
  return rep;
}

}  // namespace ibvp

#include "ibvp/entropy_core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace ibvp {

std::string_view to_string(Sign sign) {
  return sign == Sign::plus ? "+" : "-";
}

// ---------------------------------------------------------------------------
// FluxModel

namespace {

bool finite_vec(const SpaceVec& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

SpaceVec sample_point(const SampleBox& box, int dim,
                      const std::vector<double>& unit, int offset) {
  SpaceVec x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) {
    x[d] = box.x_lo[d] + unit[offset + d] * (box.x_hi[d] - box.x_lo[d]);
  }
  return x;
}

}  // namespace

FluxModel::FluxModel(FluxDefinition def, const SampleBox& box)
    : def_(std::move(def)) {
  if (def_.dim < 1 || def_.dim > kMaxDim) {
    throw Error("FluxModel '" + def_.name + "': dimension must be in [1, 3]");
  }
  if (!def_.f) throw Error("FluxModel '" + def_.name + "': missing flux");
  mode_ = def_.df_du ? DerivativeMode::analytic
                     : DerivativeMode::finite_difference;
  def_.has_divergence = static_cast<bool>(def_.div_f);

  // Consistency self-check against central differences with an O(h^2) step.
  Halton seq(2 + def_.dim, 7);
  for (int s = 0; s < 64; ++s) {
    const auto p = seq.next();
    const double t = box.t_lo + p[0] * (box.t_hi - box.t_lo);
    const SpaceVec x = sample_point(box, def_.dim, p, 1);
    const double u = box.u_bound * (2.0 * p[1 + def_.dim] - 1.0);
    const SpaceVec fv = def_.f(t, x, u);
    if (!finite_vec(fv)) {
      throw Error("FluxModel '" + def_.name + "': non-finite flux in box");
    }
    if (mode_ != DerivativeMode::analytic) continue;
    const double h = 1e-4 * std::max(1.0, std::abs(u));
    const SpaceVec fp = def_.f(t, x, u + h);
    const SpaceVec fm = def_.f(t, x, u - h);
    const SpaceVec an = def_.df_du(t, x, u);
    for (int d = 0; d < def_.dim; ++d) {
      const double fd = (fp[d] - fm[d]) / (2.0 * h);
      const double err = std::abs(an[d] - fd) / (1.0 + std::abs(an[d]));
      consistency_error_ = std::max(consistency_error_, err);
    }
  }
  if (consistency_error_ > 1e-5) {
    std::ostringstream msg;
    msg << "FluxModel '" << def_.name
        << "': analytic df/du disagrees with central differences (rel err "
        << consistency_error_ << ")";
    throw Error(msg.str());
  }
}

SpaceVec FluxModel::df_du(double t, const SpaceVec& x, double u) const {
  if (def_.df_du) return def_.df_du(t, x, u);
  const double h = fd_step(u);
  const SpaceVec fp = def_.f(t, x, u + h);
  const SpaceVec fm = def_.f(t, x, u - h);
  SpaceVec out{0.0, 0.0, 0.0};
  for (int d = 0; d < def_.dim; ++d) out[d] = (fp[d] - fm[d]) / (2.0 * h);
  return out;
}

double FluxModel::div_f(double t, const SpaceVec& x, double u) const {
  return def_.div_f ? def_.div_f(t, x, u) : 0.0;
}

double FluxModel::ddiv_f_du(double t, const SpaceVec& x, double u) const {
  if (def_.ddiv_f_du) return def_.ddiv_f_du(t, x, u);
  if (!def_.div_f) return 0.0;
  const double h = fd_step(u);
  return (def_.div_f(t, x, u + h) - def_.div_f(t, x, u - h)) / (2.0 * h);
}

double FluxModel::source(double t, const SpaceVec& x, double u) const {
  return def_.source ? def_.source(t, x, u) : 0.0;
}

double FluxModel::dsource_du(double t, const SpaceVec& x, double u) const {
  if (def_.dsource_du) return def_.dsource_du(t, x, u);
  if (!def_.source) return 0.0;
  const double h = fd_step(u);
  return (def_.source(t, x, u + h) - def_.source(t, x, u - h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBuckleyMobility = 0.5;

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error("cannot parse " + std::string(what) + " from '" +
                std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> flux_catalog() {
  return {"burgers", "linear:<a>", "buckley-leverett", "nonautonomous-demo"};
}

FluxModel make_flux(std::string_view spec) {
  FluxDefinition def;
  def.name = std::string(spec);
  if (spec == "burgers") {
    def.autonomous = true;
    def.f = [](double, const SpaceVec&, double u) {
      return SpaceVec{0.5 * u * u, 0.0, 0.0};
    };
    def.df_du = [](double, const SpaceVec&, double u) {
      return SpaceVec{u, 0.0, 0.0};
    };
  } else if (spec.starts_with("linear:")) {
    const double a = parse_double(spec.substr(7), "linear flux speed");
    def.autonomous = true;
    def.f = [a](double, const SpaceVec&, double u) {
      return SpaceVec{a * u, 0.0, 0.0};
    };
    def.df_du = [a](double, const SpaceVec&, double) {
      return SpaceVec{a, 0.0, 0.0};
    };
  } else if (spec == "buckley-leverett") {
    def.autonomous = true;
    def.f = [](double, const SpaceVec&, double u) {
      const double d = u * u + kBuckleyMobility * (1.0 - u) * (1.0 - u);
      return SpaceVec{u * u / d, 0.0, 0.0};
    };
    def.df_du = [](double, const SpaceVec&, double u) {
      const double d = u * u + kBuckleyMobility * (1.0 - u) * (1.0 - u);
      const double dd = 2.0 * u - 2.0 * kBuckleyMobility * (1.0 - u);
      return SpaceVec{(2.0 * u * d - u * u * dd) / (d * d), 0.0, 0.0};
    };
  } else if (spec == "nonautonomous-demo") {
    // f(t,x,u) = a(x) u^2 / 2 with a(x) = 1 + sin(2 pi x) / 2.
    auto a = [](double x) { return 1.0 + 0.5 * std::sin(2.0 * kPi * x); };
    auto da = [](double x) { return kPi * std::cos(2.0 * kPi * x); };
    def.f = [a](double, const SpaceVec& x, double u) {
      return SpaceVec{0.5 * a(x[0]) * u * u, 0.0, 0.0};
    };
    def.df_du = [a](double, const SpaceVec& x, double u) {
      return SpaceVec{a(x[0]) * u, 0.0, 0.0};
    };
    def.div_f = [da](double, const SpaceVec& x, double u) {
      return 0.5 * da(x[0]) * u * u;
    };
    def.ddiv_f_du = [da](double, const SpaceVec& x, double u) {
      return da(x[0]) * u;
    };
  } else {
    throw Error("unknown flux '" + std::string(spec) + "'");
  }
  return FluxModel(std::move(def));
}

FluxModel with_linear_source(const FluxModel& flux, double rate) {
  FluxDefinition def = flux.definition();
  def.source = [rate](double, const SpaceVec&, double u) { return rate * u; };
  def.dsource_du = [rate](double, const SpaceVec&, double) { return rate; };
  std::ostringstream name;
  name << def.name << "+source:" << rate;
  def.name = name.str();
  return FluxModel(std::move(def));
}

// ---------------------------------------------------------------------------
// Lipschitz constant

double lipschitz_norm(const FluxModel& flux, double horizon,
                      const SampleBox& space_box, double u_bound) {
  if (!(u_bound >= 0.0)) throw Error("lipschitz_norm: U must be >= 0");
  const int dim = flux.dim();
  const bool frozen = flux.autonomous();

  auto speed = [&](double t, const SpaceVec& x, double u) {
    const SpaceVec d = flux.df_du(t, x, u);
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += d[i] * d[i];
    s = std::sqrt(s);
    if (!std::isfinite(s)) throw Error("lipschitz_norm: non-finite df/du");
    return s;
  };

  struct Best {
    double value = -1.0;
    double t = 0.0;
    SpaceVec x{};
    double u = 0.0;
  };
  auto scan = [&](int n) {
    Best best;
    const int nt = frozen ? 1 : n;
    const int nx = frozen ? 1 : n;
    const auto ts = linspace(0.0, horizon, nt);
    const auto us = linspace(-u_bound, u_bound, n);
    std::vector<std::vector<double>> xs(dim);
    for (int d = 0; d < dim; ++d) {
      xs[d] = linspace(space_box.x_lo[d], space_box.x_hi[d], nx);
    }
    std::vector<std::size_t> idx(dim, 0);
    while (true) {
      SpaceVec x{0.0, 0.0, 0.0};
      for (int d = 0; d < dim; ++d) x[d] = xs[d][idx[d]];
      for (double t : ts) {
        for (double u : us) {
          const double s = speed(t, x, u);
          if (s > best.value) best = {s, t, x, u};
        }
      }
      int d = 0;
      while (d < dim && ++idx[d] == xs[d].size()) idx[d++] = 0;
      if (d == dim) break;
    }
    return best;
  };

  int n = 9;
  Best prev = scan(n);
  const int n_max = frozen ? 4097 : (dim == 1 ? 129 : 33);
  while (n < n_max) {
    n = 2 * n - 1;
    Best cur = scan(n);
    const bool settled =
        std::abs(cur.value - prev.value) <= 1e-3 * std::max(cur.value, 1e-300);
    prev = cur;
    if (settled) break;
  }
  if (u_bound > 0.0) {
    const double h = 2.0 * u_bound / (n - 1);
    const auto polished = maximize(
        [&](double u) { return speed(prev.t, prev.x, u); },
        std::max(-u_bound, prev.u - h), std::min(u_bound, prev.u + h), 9);
    prev.value = std::max(prev.value, polished.value);
  }
  return prev.value;
}

// ---------------------------------------------------------------------------
// Entropy pairs

namespace {

SpaceVec integrate_components(const FluxModel& flux, double t,
                              const SpaceVec& x, double lo, double hi,
                              const std::function<double(double)>& weight,
                              std::span<const double> kinks) {
  SpaceVec out{0.0, 0.0, 0.0};
  if (lo == hi) return out;
  const auto opts = pair_quadrature();
  for (int d = 0; d < flux.dim(); ++d) {
    out[d] = integrate_value(
        [&](double s) {
          const double w = weight(s);
          return w == 0.0 ? 0.0 : w * flux.df_du(t, x, s)[d];
        },
        lo, hi, opts, kinks);
  }
  return out;
}

double integrate_divergence(const FluxModel& flux, double t, const SpaceVec& x,
                            double lo, double hi,
                            const std::function<double(double)>& weight,
                            std::span<const double> kinks) {
  if (lo == hi || !flux.definition().has_divergence) return 0.0;
  return integrate_value(
      [&](double s) {
        const double w = weight(s);
        return w == 0.0 ? 0.0 : w * flux.ddiv_f_du(t, x, s);
      },
      lo, hi, pair_quadrature(), kinks);
}

}  // namespace

EntropyPair entropy_pair_from_eta(const FluxModel& flux, std::string label,
                                  std::function<double(double)> eta,
                                  std::function<double(double)> eta_prime,
                                  double anchor, std::vector<double> kinks) {
  EntropyPair p;
  p.label = std::move(label);
  p.eta = std::move(eta);
  p.eta_prime = eta_prime;
  p.kinks = kinks;
  p.q = [flux, eta_prime, anchor, kinks](double t, const SpaceVec& x,
                                         double u) {
    return integrate_components(flux, t, x, anchor, u, eta_prime, kinks);
  };
  p.div_q = [flux, eta_prime, anchor, kinks](double t, const SpaceVec& x,
                                             double u) {
    return integrate_divergence(flux, t, x, anchor, u, eta_prime, kinks);
  };
  return p;
}

BoundaryEntropyPair boundary_pair_from_H(
    const FluxModel& flux, std::string label,
    std::function<double(double, double)> H,
    std::function<double(double, double)> dH_dz,
    std::function<std::vector<double>(double)> kinks) {
  if (!kinks) kinks = [](double) { return std::vector<double>{}; };
  BoundaryEntropyPair p;
  p.label = std::move(label);
  p.H = std::move(H);
  p.dH_dz = dH_dz;
  p.kinks = kinks;
  p.Q = [flux, dH_dz, kinks](double t, const SpaceVec& x, double z, double w) {
    const auto bp = kinks(w);
    return integrate_components(
        flux, t, x, w, z, [&](double s) { return dH_dz(s, w); }, bp);
  };
  p.div_Q = [flux, dH_dz, kinks](double t, const SpaceVec& x, double z,
                                 double w) {
    const auto bp = kinks(w);
    return integrate_divergence(
        flux, t, x, w, z, [&](double s) { return dH_dz(s, w); }, bp);
  };
  return p;
}

namespace {

std::string label_with(std::string_view base, double k) {
  std::ostringstream s;
  s << base << "(k=" << k << ")";
  return s.str();
}

}  // namespace

EntropyPair kruzkov_pair(const FluxModel& flux, double k) {
  EntropyPair p;
  p.label = label_with("kruzkov", k);
  p.eta = [k](double u) { return std::abs(u - k); };
  p.eta_prime = [k](double u) { return sgn(u - k); };
  p.kinks = {k};
  p.q = [flux, k](double t, const SpaceVec& x, double u) {
    const double s = sgn(u - k);
    const SpaceVec fu = flux.f(t, x, u);
    const SpaceVec fk = flux.f(t, x, k);
    return SpaceVec{s * (fu[0] - fk[0]), s * (fu[1] - fk[1]),
                    s * (fu[2] - fk[2])};
  };
  p.div_q = [flux, k](double t, const SpaceVec& x, double u) {
    return sgn(u - k) * (flux.div_f(t, x, u) - flux.div_f(t, x, k));
  };
  return p;
}

EntropyPair kruzkov_pair_quadrature(const FluxModel& flux, double k) {
  return entropy_pair_from_eta(
      flux, label_with("kruzkov-quadrature", k),
      [k](double u) { return std::abs(u - k); },
      [k](double u) { return sgn(u - k); }, k, {k});
}

EntropyPair semi_kruzkov_pair(const FluxModel& flux, double k, Sign sign) {
  EntropyPair p;
  p.label = label_with(sign == Sign::plus ? "semi-kruzkov+" : "semi-kruzkov-", k);
  p.eta = [k, sign](double u) { return semi_part(sign, u - k); };
  p.eta_prime = [k, sign](double u) { return semi_sgn(sign, u - k); };
  p.kinks = {k};
  p.q = [flux, k, sign](double t, const SpaceVec& x, double u) {
    const double s = semi_sgn(sign, u - k);
    if (s == 0.0) return SpaceVec{0.0, 0.0, 0.0};
    const SpaceVec fu = flux.f(t, x, u);
    const SpaceVec fk = flux.f(t, x, k);
    return SpaceVec{s * (fu[0] - fk[0]), s * (fu[1] - fk[1]),
                    s * (fu[2] - fk[2])};
  };
  p.div_q = [flux, k, sign](double t, const SpaceVec& x, double u) {
    const double s = semi_sgn(sign, u - k);
    if (s == 0.0) return 0.0;
    return s * (flux.div_f(t, x, u) - flux.div_f(t, x, k));
  };
  return p;
}

EntropyPair quadratic_pair(const FluxModel& flux, double k) {
  return entropy_pair_from_eta(
      flux, label_with("quadratic", k),
      [k](double u) { return (u - k) * (u - k); },
      [k](double u) { return 2.0 * (u - k); }, k);
}

EntropyPair smooth_abs_family(const FluxModel& flux, double k, int n) {
  if (n < 1) throw Error("smooth_abs_family: n must be >= 1");
  const double delta = 1.0 / n;
  std::ostringstream label;
  label << "smooth-abs(k=" << k << ",n=" << n << ")";
  return entropy_pair_from_eta(
      flux, label.str(),
      [k, delta](double z) { return std::sqrt((z - k) * (z - k) + delta); },
      [k, delta](double z) {
        return (z - k) / std::sqrt((z - k) * (z - k) + delta);
      },
      k, {k});
}

BoundaryEntropyPair smoothed_semi_pair(const FluxModel& flux, Sign sign,
                                       int n) {
  if (n < 1) throw Error("smoothed_semi_pair: n must be >= 1");
  const double eps = 1.0 / n;
  std::ostringstream label;
  label << "smoothed-semi" << to_string(sign) << "(n=" << n << ")";
  auto H = [sign, eps](double z, double w) {
    const double a = semi_part(sign, z - w);
    return std::sqrt(a * a + eps * eps) - eps;
  };
  auto dH = [sign, eps](double z, double w) {
    const double a = semi_part(sign, z - w);
    if (a == 0.0) return 0.0;
    const double slope = sign == Sign::plus ? 1.0 : -1.0;
    return slope * a / std::sqrt(a * a + eps * eps);
  };
  return boundary_pair_from_H(flux, label.str(), H, dH,
                              [](double w) { return std::vector<double>{w}; });
}

double hull_distance(double u, double w, double k) {
  const double lo = std::min(w, k);
  const double hi = std::max(w, k);
  if (u < lo) return lo - u;
  if (u > hi) return u - hi;
  return 0.0;
}

namespace {

double hull_distance_slope(double u, double w, double k) {
  if (u < std::min(w, k)) return -1.0;
  if (u > std::max(w, k)) return 1.0;
  return 0.0;
}

}  // namespace

BoundaryEntropyPair distance_pair_family(const FluxModel& flux, double k,
                                         int n) {
  if (n < 1) throw Error("distance_pair_family: n must be >= 1");
  const double eps = 1.0 / n;
  std::ostringstream label;
  label << "distance(k=" << k << ",n=" << n << ")";
  auto H = [k, eps](double u, double w) {
    const double d = hull_distance(u, w, k);
    return std::sqrt(d * d + eps * eps) - eps;
  };
  auto dH = [k, eps](double u, double w) {
    const double d = hull_distance(u, w, k);
    if (d == 0.0) return 0.0;
    return hull_distance_slope(u, w, k) * d / std::sqrt(d * d + eps * eps);
  };
  return boundary_pair_from_H(flux, label.str(), H, dH, [k](double w) {
    return std::vector<double>{std::min(w, k), std::max(w, k)};
  });
}

BoundaryEntropyPair distance_pair_limit(const FluxModel& flux, double k) {
  return boundary_pair_from_H(
      flux, label_with("distance-limit", k),
      [k](double u, double w) { return hull_distance(u, w, k); },
      [k](double u, double w) { return hull_distance_slope(u, w, k); },
      [k](double w) {
        return std::vector<double>{std::min(w, k), std::max(w, k)};
      });
}

namespace {

// Index of the first row of the six-case table matched by (z, w, k):
// 0: z<=w<=k, 1: w<=z<=k, 2: w<=k<=z, 3: z<=k<=w, 4: k<=z<=w, 5: k<=w<=z.
int six_case(double z, double w, double k) {
  if (z <= w && w <= k) return 0;
  if (w <= z && z <= k) return 1;
  if (w <= k && k <= z) return 2;
  if (z <= k && k <= w) return 3;
  if (k <= z && z <= w) return 4;
  return 5;
}

}  // namespace

BoundaryEntropyPair shifted_pair_limit(const EntropyPair& base,
                                       const FluxModel& flux, double k) {
  (void)flux;
  BoundaryEntropyPair p;
  p.label = "shifted-limit[" + base.label + "]";
  const auto eta = base.eta;
  const auto deta = base.eta_prime;
  const auto q = base.q;
  const auto div_q = base.div_q;
  p.H = [eta, k](double z, double w) {
    switch (six_case(z, w, k)) {
      case 0:
      case 5:
        return eta(z) - eta(w);
      case 2:
      case 3:
        return eta(z);
      default:
        return 0.0;
    }
  };
  p.dH_dz = [deta, k](double z, double w) {
    const int c = six_case(z, w, k);
    return (c == 1 || c == 4) ? 0.0 : deta(z);
  };
  p.Q = [q, k](double t, const SpaceVec& x, double z, double w) {
    switch (six_case(z, w, k)) {
      case 0:
      case 5: {
        const SpaceVec a = q(t, x, z);
        const SpaceVec b = q(t, x, w);
        return SpaceVec{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
      }
      case 2:
      case 3:
        return q(t, x, z);
      default:
        return SpaceVec{0.0, 0.0, 0.0};
    }
  };
  p.div_Q = [div_q, k](double t, const SpaceVec& x, double z, double w) {
    switch (six_case(z, w, k)) {
      case 0:
      case 5:
        return div_q(t, x, z) - div_q(t, x, w);
      case 2:
      case 3:
        return div_q(t, x, z);
      default:
        return 0.0;
    }
  };
  const auto base_kinks = base.kinks;
  p.kinks = [k, base_kinks](double w) {
    std::vector<double> out = base_kinks;
    out.push_back(w);
    out.push_back(k);
    return out;
  };
  return p;
}

double mollifier(double s) {
  static const double norm = [] {
    const double mass = integrate_value(
        [](double r) {
          const double d = 1.0 - r * r;
          return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
        },
        -1.0, 1.0, {1e-15, 1e-13, 4000});
    return 1.0 / mass;
  }();
  const double d = 1.0 - s * s;
  return d > 0.0 ? norm * std::exp(-1.0 / d) : 0.0;
}

BoundaryEntropyPair shifted_pair_family(const EntropyPair& base,
                                        const FluxModel& flux, double k,
                                        int n) {
  if (n < 1) throw Error("shifted_pair_family: n must be >= 1");
  if (std::abs(base.eta(k)) > 1e-12) {
    throw Error("shifted_pair_family: base entropy must vanish at k");
  }
  const double eps = 1.0 / n;
  const auto eta = base.eta;
  const auto deta = base.eta_prime;
  const auto base_kinks = base.kinks;

  // Flat zone [lo, hi] of the clipped pair H_n(., w).
  auto flat = [k, eps](double w) {
    return w <= k ? std::pair{w - eps, k + eps} : std::pair{k - eps, w + eps};
  };
  auto clipped = [eta, flat](double z, double w) {
    const auto [lo, hi] = flat(w);
    if (z <= lo) return eta(z) - eta(lo);
    if (z >= hi) return eta(z) - eta(hi);
    return 0.0;
  };
  auto clipped_slope = [deta, flat](double z, double w) {
    const auto [lo, hi] = flat(w);
    return (z < lo || z > hi) ? deta(z) : 0.0;
  };
  // Breakpoints of s -> g(z - eps s, w) on (-1, 1).
  auto s_breaks = [eps, flat, base_kinks](double z, double w) {
    const auto [lo, hi] = flat(w);
    std::vector<double> out{(z - lo) / eps, (z - hi) / eps};
    for (double kk : base_kinks) out.push_back((z - kk) / eps);
    return out;
  };
  const QuadratureOptions inner{1e-12, 1e-10, 2000};

  auto H = [clipped, s_breaks, eps, inner](double z, double w) {
    const auto bp = s_breaks(z, w);
    return integrate_value(
        [&](double s) { return clipped(z - eps * s, w) * mollifier(s); }, -1.0,
        1.0, inner, bp);
  };
  auto dH = [clipped_slope, s_breaks, eps, inner](double z, double w) {
    const auto bp = s_breaks(z, w);
    return integrate_value(
        [&](double s) { return clipped_slope(z - eps * s, w) * mollifier(s); },
        -1.0, 1.0, inner, bp);
  };
  auto kinks = [flat, eps, base_kinks](double w) {
    const auto [lo, hi] = flat(w);
    std::vector<double> out{lo - eps, lo + eps, hi - eps, hi + eps};
    for (double kk : base_kinks) {
      out.push_back(kk - eps);
      out.push_back(kk + eps);
    }
    return out;
  };
  std::ostringstream label;
  label << "shifted[" << base.label << "](n=" << n << ")";
  return boundary_pair_from_H(flux, label.str(), H, dH, kinks);
}

// ---------------------------------------------------------------------------
// Verification

bool PropertyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.passed; });
}

const PropertyCheck& PropertyReport::check(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error("no property check named '" + std::string(name) + "'");
}

namespace {

struct Tally {
  PropertyCheck c;
  Tally(std::string name, double tol) : c{std::move(name), 0.0, tol, true} {}
  void add(double violation) {
    if (!std::isfinite(violation)) violation = std::numeric_limits<double>::infinity();
    c.max_violation = std::max(c.max_violation, violation);
  }
  PropertyCheck done() {
    c.passed = c.max_violation <= c.tolerance;
    return c;
  }
};

bool near_any(double z, const std::vector<double>& points, double r) {
  return std::any_of(points.begin(), points.end(),
                     [&](double p) { return std::abs(z - p) < r; });
}

}  // namespace

PropertyReport verify_flux(const FluxModel& flux, int samples,
                           const SampleBox& box) {
  if (samples < 1) throw Error("verify_flux: samples must be >= 1");
  const int dim = flux.dim();
  Tally finite("finite", 0.0);
  Tally deriv("df_du-consistency", 1e-5);
  Tally div_deriv("ddiv_du-consistency", 1e-5);
  Halton seq(2 + dim);
  for (int s = 0; s < samples; ++s) {
    const auto p = seq.next();
    const double t = box.t_lo + p[0] * (box.t_hi - box.t_lo);
    const SpaceVec x = sample_point(box, dim, p, 1);
    const double u = box.u_bound * (2.0 * p[1 + dim] - 1.0);
    const SpaceVec fv = flux.f(t, x, u);
    const SpaceVec dv = flux.df_du(t, x, u);
    finite.add(finite_vec(fv) && finite_vec(dv) &&
                       std::isfinite(flux.div_f(t, x, u)) &&
                       std::isfinite(flux.source(t, x, u))
                   ? 0.0
                   : 1.0);
    const double h = 1e-4 * std::max(1.0, std::abs(u));
    const SpaceVec fp = flux.f(t, x, u + h);
    const SpaceVec fm = flux.f(t, x, u - h);
    for (int d = 0; d < dim; ++d) {
      const double fd = (fp[d] - fm[d]) / (2.0 * h);
      deriv.add(std::abs(dv[d] - fd) / (1.0 + std::abs(dv[d])));
    }
    const double ddiv = flux.ddiv_f_du(t, x, u);
    const double fd_div =
        (flux.div_f(t, x, u + h) - flux.div_f(t, x, u - h)) / (2.0 * h);
    div_deriv.add(std::abs(ddiv - fd_div) / (1.0 + std::abs(ddiv)));
  }
  return {flux.name(), samples, {finite.done(), deriv.done(), div_deriv.done()}};
}

PropertyReport verify_entropy_pair(const EntropyPair& pair,
                                   const FluxModel& flux, int samples,
                                   const SampleBox& box) {
  if (samples < 1) throw Error("verify_entropy_pair: samples must be >= 1");
  const int dim = flux.dim();
  Tally finite("finite", 0.0);
  Tally convex("convexity", 1e-12);
  Tally compat("compatibility", 1e-7);
  Tally slope("eta_prime-consistency", 1e-5);
  Halton seq(1 + dim + 3);
  const double U = box.u_bound;
  for (int s = 0; s < samples; ++s) {
    const auto p = seq.next();
    const double t = box.t_lo + p[0] * (box.t_hi - box.t_lo);
    const SpaceVec x = sample_point(box, dim, p, 1);
    const double a = U * (2.0 * p[1 + dim] - 1.0);
    const double b = U * (2.0 * p[2 + dim] - 1.0);
    const double theta = p[3 + dim];

    const double ea = pair.eta(a);
    const double eb = pair.eta(b);
    const SpaceVec qa = pair.q(t, x, a);
    const SpaceVec qb = pair.q(t, x, b);
    finite.add(std::isfinite(ea) && std::isfinite(eb) && finite_vec(qa) &&
                       finite_vec(qb) && std::isfinite(pair.eta_prime(a))
                   ? 0.0
                   : 1.0);

    const double chord = theta * ea + (1.0 - theta) * eb;
    const double mid = pair.eta(theta * a + (1.0 - theta) * b);
    convex.add(std::max(0.0, mid - chord) / (1.0 + std::abs(chord)));

    for (int d = 0; d < dim; ++d) {
      const double ref = integrate_value(
          [&](double z) { return pair.eta_prime(z) * flux.df_du(t, x, z)[d]; },
          a, b, pair_quadrature(), pair.kinks);
      const double diff = qb[d] - qa[d];
      compat.add(std::abs(diff - ref) / (1.0 + std::abs(ref)));
    }

    if (!near_any(a, pair.kinks, 1e-3)) {
      const double h = 1e-6 * std::max(1.0, std::abs(a));
      const double fd = (pair.eta(a + h) - pair.eta(a - h)) / (2.0 * h);
      const double an = pair.eta_prime(a);
      slope.add(std::abs(fd - an) / (1.0 + std::abs(an)));
    }
  }
  return {pair.label, samples,
          {finite.done(), convex.done(), compat.done(), slope.done()}};
}

PropertyReport verify_boundary_pair(const BoundaryEntropyPair& pair,
                                    const FluxModel& flux, int samples,
                                    const SampleBox& box) {
  if (samples < 1) throw Error("verify_boundary_pair: samples must be >= 1");
  const int dim = flux.dim();
  Tally finite("finite", 0.0);
  Tally convex("convexity", 1e-12);
  Tally nonneg("nonnegative", 1e-14);
  Tally diag_h("diagonal-H", 1e-14);
  Tally diag_dh("diagonal-dH", 1e-12);
  Tally diag_q("diagonal-Q", 1e-10);
  Tally compat("compatibility", 1e-7);
  Tally slope("dH-consistency", 1e-5);
  Halton seq(1 + dim + 4);
  const double U = box.u_bound;
  for (int s = 0; s < samples; ++s) {
    const auto p = seq.next();
    const double t = box.t_lo + p[0] * (box.t_hi - box.t_lo);
    const SpaceVec x = sample_point(box, dim, p, 1);
    const double a = U * (2.0 * p[1 + dim] - 1.0);
    const double b = U * (2.0 * p[2 + dim] - 1.0);
    const double w = U * (2.0 * p[3 + dim] - 1.0);
    const double theta = p[4 + dim];

    const double ha = pair.H(a, w);
    const double hb = pair.H(b, w);
    const SpaceVec qa = pair.Q(t, x, a, w);
    const SpaceVec qb = pair.Q(t, x, b, w);
    finite.add(std::isfinite(ha) && std::isfinite(hb) && finite_vec(qa) &&
                       finite_vec(qb)
                   ? 0.0
                   : 1.0);

    const double chord = theta * ha + (1.0 - theta) * hb;
    const double mid = pair.H(theta * a + (1.0 - theta) * b, w);
    convex.add(std::max(0.0, mid - chord) / (1.0 + std::abs(chord)));
    nonneg.add(std::max(0.0, -ha));
    nonneg.add(std::max(0.0, -hb));

    diag_h.add(std::abs(pair.H(w, w)));
    diag_dh.add(std::abs(pair.dH_dz(w, w)));
    const SpaceVec qw = pair.Q(t, x, w, w);
    for (int d = 0; d < dim; ++d) diag_q.add(std::abs(qw[d]));

    const auto kinks = pair.kinks(w);
    for (int d = 0; d < dim; ++d) {
      const double ref = integrate_value(
          [&](double z) { return pair.dH_dz(z, w) * flux.df_du(t, x, z)[d]; },
          a, b, pair_quadrature(), kinks);
      const double diff = qb[d] - qa[d];
      compat.add(std::abs(diff - ref) / (1.0 + std::abs(ref)));
    }

    if (!near_any(a, kinks, 1e-3)) {
      const double h = 1e-6 * std::max(1.0, std::abs(a));
      const double fd = (pair.H(a + h, w) - pair.H(a - h, w)) / (2.0 * h);
      const double an = pair.dH_dz(a, w);
      slope.add(std::abs(fd - an) / (1.0 + std::abs(an)));
    }
  }
  return {pair.label,
          samples,
          {finite.done(), convex.done(), nonneg.done(), diag_h.done(),
           diag_dh.done(), diag_q.done(), compat.done(), slope.done()}};
}

}  // namespace ibvp

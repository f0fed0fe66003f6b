#include "ibvp/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace ibvp {

void IBVPProblem::validate() const {
  if (!(a < b)) throw Error("IBVPProblem: need a < b");
  if (!(T > 0.0)) throw Error("IBVPProblem: need T > 0");
  if (flux.dim() != 1) throw Error("IBVPProblem: solver is 1D only");
  if (!u0 || !ub_left || !ub_right) throw Error("IBVPProblem: missing data");
}

double IBVPProblem::data_bound() const {
  double m = 0.0;
  for (double x : linspace(a, b, 257)) m = std::max(m, std::abs(u0(x)));
  for (double t : linspace(0.0, T, 257)) {
    m = std::max({m, std::abs(ub_left(t)), std::abs(ub_right(t))});
  }
  return m;
}

Grid1D make_grid(const IBVPProblem& problem, int cells, double cfl) {
  if (cells < 4) throw Error("Grid1D: need at least 4 cells");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw Error("Grid1D: cfl must be in (0, 1]");
  return {cells, cfl, problem.a, problem.b};
}

namespace {

// Extremum of s * f over [lo, hi] (s = +1 max, s = -1 min). Endpoints are
// exact; interior refinement only when a sample or an inward slope says the
// extremum may be inside.
double riemann_extremum(const FluxModel& flux, double t, double x, double lo,
                        double hi, double s) {
  const SpaceVec xv = point1(x);
  auto g = [&](double u) { return s * flux.f(t, xv, u)[0]; };
  constexpr int n = 17;
  const double step = (hi - lo) / (n - 1);
  double best = g(lo);
  int best_i = 0;
  for (int i = 1; i < n; ++i) {
    const double v = g(i == n - 1 ? hi : lo + i * step);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  bool refine = best_i != 0 && best_i != n - 1;
  if (!refine) {
    const double slope = s * flux.df_du(t, xv, best_i == 0 ? lo : hi)[0];
    refine = best_i == 0 ? slope > 0.0 : slope < 0.0;
  }
  if (refine) {
    const double bl = lo + std::max(best_i - 1, 0) * step;
    const double br = std::min(lo + (best_i + 1) * step, hi);
    best = std::max(best, maximize(g, bl, br, 5).value);
  }
  return s * best;
}

struct Bounds {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

double max_speed(const FluxModel& flux, double t, const std::vector<double>& xs,
                 double umin, double umax) {
  double smax = 0.0;
  auto speed_at = [&](double x) {
    const SpaceVec xv = point1(x);
    if (umin == umax) return std::abs(flux.df_du(t, xv, umin)[0]);
    return maximize([&](double u) { return std::abs(flux.df_du(t, xv, u)[0]); },
                    umin, umax, 17)
        .value;
  };
  if (flux.autonomous()) return speed_at(xs.front());
  for (double x : xs) smax = std::max(smax, speed_at(x));
  return smax;
}

}  // namespace

double godunov_numflux(const FluxModel& flux, double t, double x, double uL,
                       double uR) {
  if (uL == uR) return flux.f1(t, x, uL);
  if (uL < uR) return riemann_extremum(flux, t, x, uL, uR, -1.0);
  return riemann_extremum(flux, t, x, uR, uL, 1.0);
}

Field1D solve(const IBVPProblem& problem, const Grid1D& grid,
              const SolveOptions& opts) {
  problem.validate();
  if (grid.cells < 4) throw Error("solve: need at least 4 cells");
  if (opts.trace_levels < 1 || opts.trace_levels > grid.cells) {
    throw Error("solve: invalid trace level count");
  }
  const FluxModel& flux = problem.flux;
  const int M = grid.cells;
  const double dx = grid.dx();
  const double T = problem.T;

  Field1D field;
  field.a = grid.a;
  field.b = grid.b;
  field.cells = M;
  field.dx = dx;
  field.T = T;
  for (int j = 1; j <= opts.trace_levels; ++j) {
    field.trace_offsets.push_back((j - 0.5) * dx);
  }

  std::vector<double> u(M);
  Bounds data;
  for (int i = 0; i < M; ++i) {
    u[i] = problem.u0(grid.center(i));
    data.add(u[i]);
  }
  const double bound = std::max(1.0, problem.data_bound());
  const bool monotone = flux.autonomous() && !flux.has_source();
  field.max_principle_checked = monotone;

  std::vector<double> interfaces(M + 1);
  for (int i = 0; i <= M; ++i) interfaces[i] = grid.a + i * dx;

  auto record = [&](double t) {
    field.times.push_back(t);
    field.snapshots.push_back(u);
    std::vector<double> left(opts.trace_levels), right(opts.trace_levels);
    for (int j = 0; j < opts.trace_levels; ++j) {
      left[j] = u[j];
      right[j] = u[M - 1 - j];
    }
    field.trace_left.push_back(std::move(left));
    field.trace_right.push_back(std::move(right));
  };
  record(0.0);

  std::vector<double> F(M + 1);
  std::vector<double> next(M);
  double t = 0.0;
  long steps = 0;
  while (t < T) {
    if (++steps > opts.max_steps) throw Error("solve: step budget exhausted");
    const double gl = problem.ub_left(t);
    const double gr = problem.ub_right(t);
    data.add(gl);
    data.add(gr);
    Bounds range;
    for (double v : u) range.add(v);
    range.add(gl);
    range.add(gr);

    const double smax = max_speed(flux, t, interfaces, range.lo, range.hi);
    double dt = smax > 0.0 ? grid.cfl * dx / smax : T - t;
    if (t + dt >= T) dt = T - t;
    if (!(dt >= 1e-14 * T)) {
      std::ostringstream msg;
      msg << "solve: time step underflow at t = " << t << " (dt = " << dt
          << ", max speed " << smax << ")";
      throw Error(msg.str());
    }

    for (int i = 0; i <= M; ++i) {
      const double uL = i == 0 ? gl : u[i - 1];
      const double uR = i == M ? gr : u[i];
      F[i] = godunov_numflux(flux, t, interfaces[i], uL, uR);
    }
    const double lambda = dt / dx;
    double mass_before = 0.0, mass_after = 0.0, mass_abs = 0.0;
    double source_mass = 0.0;
    for (int i = 0; i < M; ++i) {
      next[i] = u[i] - lambda * (F[i + 1] - F[i]);
      mass_before += u[i];
      mass_abs += std::abs(u[i]);
    }
    if (flux.has_source()) {
      for (int i = 0; i < M; ++i) {
        const double s = flux.source(t, point1(grid.center(i)), next[i]);
        next[i] += dt * s;
        source_mass += s;
      }
    }
    for (int i = 0; i < M; ++i) {
      mass_after += next[i];
      if (!std::isfinite(next[i]) ||
          std::abs(next[i]) > opts.blowup_factor * bound) {
        std::ostringstream msg;
        msg << "solve: blow-up at t = " << t + dt << ", cell " << i
            << " (value " << next[i] << ")";
        throw Error(msg.str());
      }
    }
    // Telescoping: change of mass = boundary fluxes + source.
    const double defect = (mass_after - mass_before) * dx -
                          dt * (F[0] - F[M]) - dt * dx * source_mass;
    const double scale = mass_abs * dx + dt * (std::abs(F[0]) + std::abs(F[M])) +
                         dt * dx * std::abs(source_mass);
    if (scale > 0.0) {
      field.max_conservation_defect =
          std::max(field.max_conservation_defect, std::abs(defect) / scale);
    }
    u.swap(next);
    t = (dt == T - t) ? T : t + dt;

    if (monotone) {
      for (double v : u) {
        field.max_principle_violation =
            std::max({field.max_principle_violation, v - data.hi, data.lo - v});
      }
    }
    record(t);
  }
  field.data_lo = data.lo;
  field.data_hi = data.hi;
  return field;
}

std::vector<TracePoint> extract_trace(const Field1D& field, Side side,
                                      bool richardson) {
  const auto& log = side == Side::left ? field.trace_left : field.trace_right;
  if (field.trace_offsets.size() < 2) {
    throw Error("extract_trace: need at least two offset levels");
  }
  std::vector<TracePoint> out;
  out.reserve(log.size());
  for (std::size_t n = 0; n < log.size(); ++n) {
    const double v1 = log[n][0];
    const double v2 = log[n][1];
    // Offsets dx/2 and 3dx/2 extrapolated to 0.
    const double value = richardson ? 1.5 * v1 - 0.5 * v2 : v1;
    out.push_back({field.times[n], value, std::abs(v1 - v2)});
  }
  return out;
}

double l1_error(const Field1D& field,
                const std::function<double(double, double)>& exact) {
  const auto& u = field.snapshots.back();
  const double t = field.times.back();
  double e = 0.0;
  for (int i = 0; i < field.cells; ++i) {
    e += std::abs(u[i] - exact(t, field.center(i)));
  }
  return e * field.dx;
}

void write_field_csv(const Field1D& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(17);
  out << "t,x,u\n";
  for (std::size_t n = 0; n < field.times.size(); ++n) {
    for (int i = 0; i < field.cells; ++i) {
      out << field.times[n] << ',' << field.center(i) << ','
          << field.snapshots[n][i] << '\n';
    }
  }
}

void write_trace_csv(const Field1D& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(17);
  out << "t,side,offset,value\n";
  for (std::size_t n = 0; n < field.times.size(); ++n) {
    for (std::size_t j = 0; j < field.trace_offsets.size(); ++j) {
      out << field.times[n] << ",left," << field.trace_offsets[j] << ','
          << field.trace_left[n][j] << '\n';
      out << field.times[n] << ",right," << field.trace_offsets[j] << ','
          << field.trace_right[n][j] << '\n';
    }
  }
}

namespace {

constexpr char kMagic[8] = {'I', 'B', 'V', 'P', 'F', 'L', 'D', '1'};

template <class T>
void put(std::ostream& out, T v) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  out.write(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <class T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bits{};
  in.read(reinterpret_cast<char*>(bits.data()), bits.size());
  if (!in) throw Error("read_field_binary: truncated file");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_field_binary(const Field1D& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, field.cells);
  put<std::uint64_t>(out, field.times.size());
  put(out, field.a);
  put(out, field.b);
  put(out, field.times.size() > 1 ? field.dt(0) : 0.0);
  put(out, field.T);
  for (std::size_t n = 0; n < field.times.size(); ++n) {
    put(out, field.times[n]);
    for (double v : field.snapshots[n]) put(out, v);
  }
}

Field1D read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("read_field_binary: bad magic in '" + path + "'");
  }
  Field1D f;
  f.cells = static_cast<int>(get<std::uint64_t>(in));
  const auto count = get<std::uint64_t>(in);
  f.a = get<double>(in);
  f.b = get<double>(in);
  (void)get<double>(in);
  f.T = get<double>(in);
  if (f.cells < 2 || !(f.a < f.b)) throw Error("read_field_binary: bad header");
  f.dx = (f.b - f.a) / f.cells;
  f.trace_offsets = {0.5 * f.dx, 1.5 * f.dx};
  for (std::uint64_t n = 0; n < count; ++n) {
    f.times.push_back(get<double>(in));
    std::vector<double> u(f.cells);
    for (double& v : u) v = get<double>(in);
    f.trace_left.push_back({u[0], u[1]});
    f.trace_right.push_back({u[f.cells - 1], u[f.cells - 2]});
    f.snapshots.push_back(std::move(u));
  }
  return f;
}

}  // namespace ibvp

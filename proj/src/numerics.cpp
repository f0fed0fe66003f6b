#include "ibvp/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>

namespace ibvp {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel eval_panel(const std::function<double(double)>& g, double lo, double hi) {
  double err = 0.0;
  const double v = kronrod_panel(g, lo, hi, &err);
  return {lo, hi, v, err};
}

}  // namespace

double kronrod_panel(const std::function<double(double)>& g, double lo,
                     double hi, double* error) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const double fc = g(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = g(c - dx);
    const double f2 = g(c + dx);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  if (error != nullptr) *error = std::abs((kron - gauss) * h);
  return kron * h;
}

void kronrod_nodes(double lo, double hi, std::vector<double>& nodes,
                   std::vector<double>& weights) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  for (int j = 0; j < 7; ++j) {
    nodes.push_back(c - h * kXgk[j]);
    weights.push_back(h * kWgk[j]);
    nodes.push_back(c + h * kXgk[j]);
    weights.push_back(h * kWgk[j]);
  }
  nodes.push_back(c);
  weights.push_back(h * kWgk[7]);
}

QuadratureResult integrate(const std::function<double(double)>& g, double lo,
                           double hi, const QuadratureOptions& opts,
                           std::span<const double> breakpoints) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw QuadratureError("integrate: non-finite limits");
  }
  if (lo == hi) return {};
  if (hi < lo) {
    auto r = integrate(g, hi, lo, opts, breakpoints);
    r.value = -r.value;
    return r;
  }

  std::vector<double> cuts{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  int evaluations = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = eval_panel(g, cuts[i], cuts[i + 1]);
    evaluations += 15;
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  auto converged = [&] {
    return total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  };
  while (!converged()) {
    if (static_cast<int>(heap.size()) >= opts.max_intervals) {
      if (!opts.throw_on_budget) break;
      std::ostringstream msg;
      msg << "integrate: no convergence on [" << lo << ", " << hi
          << "] after " << heap.size() << " panels; estimate " << total
          << " +/- " << total_err;
      throw QuadratureError(msg.str());
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Panel cannot be split further in floating point; accept it.
      total_err -= worst.error;
      worst.error = 0.0;
      heap.push(worst);
      continue;
    }
    Panel left = eval_panel(g, worst.lo, mid);
    Panel right = eval_panel(g, mid, worst.hi);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift accumulated by the running updates.
  double sum = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(sum)) {
    throw QuadratureError("integrate: non-finite integrand value");
  }
  return {sum, err, evaluations};
}

double integrate_value(const std::function<double(double)>& g, double lo,
                       double hi, const QuadratureOptions& opts,
                       std::span<const double> breakpoints) {
  return integrate(g, lo, hi, opts, breakpoints).value;
}

Halton::Halton(int dims, std::uint64_t skip) : dims_(dims), index_(skip) {
  if (dims < 1 || dims > 8) throw Error("Halton: dims must be in [1, 8]");
}

std::vector<double> Halton::next() {
  static constexpr std::array<int, 8> primes = {2, 3, 5, 7, 11, 13, 17, 19};
  ++index_;
  std::vector<double> p(dims_);
  for (int d = 0; d < dims_; ++d) {
    const int base = primes[d];
    double f = 1.0;
    double r = 0.0;
    std::uint64_t i = index_;
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    p[d] = r;
  }
  return p;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Extremum maximize(const std::function<double(double)>& g, double lo,
                  double hi, int scan_points) {
  if (hi < lo) std::swap(lo, hi);
  if (lo == hi) return {lo, g(lo)};
  scan_points = std::max(scan_points, 3);
  const double step = (hi - lo) / (scan_points - 1);
  Extremum best{lo, g(lo)};
  int best_i = 0;
  for (int i = 1; i < scan_points; ++i) {
    const double x = (i == scan_points - 1) ? hi : lo + i * step;
    const double v = g(x);
    if (v > best.value) {
      best = {x, v};
      best_i = i;
    }
  }
  // Golden-section search on the bracket around the best sample.
  double a = lo + std::max(best_i - 1, 0) * step;
  double b = std::min(lo + (best_i + 1) * step, hi);
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int it = 0; it < 80 && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = g(d);
    }
  }
  for (auto [x, v] : {std::pair{c, gc}, std::pair{d, gd}}) {
    if (v > best.value) best = {x, v};
  }
  return best;
}

Extremum minimize(const std::function<double(double)>& g, double lo,
                  double hi, int scan_points) {
  auto r = maximize([&](double x) { return -g(x); }, lo, hi, scan_points);
  return {r.arg, -r.value};
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count <= 1 || lo == hi) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo + i * step;
  out.back() = hi;
  return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ibvp

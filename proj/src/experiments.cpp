#include "ibvp/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>

#include "json.hpp"

#include "ibvp/boundary_admissibility.hpp"
#include "ibvp/fixtures.hpp"

namespace ibvp {

using ojson = nlohmann::ordered_json;

std::string output_directory(const ExperimentConfig& c) {
  const char* env = std::getenv("IBVP_OUTPUT_DIR");
  std::filesystem::path dir = (env != nullptr && *env != '\0') ? env : c.output_dir;
  dir /= c.experiment;
  std::filesystem::create_directories(dir);
  return dir.string();
}

namespace {

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text << '\n';
}

ojson manifest(const std::string& command, const ExperimentConfig& c) {
  ojson m;
  m["tool"] = "ibvp";
  m["version"] = std::string(kToolVersion);
  m["command"] = command;
  m["config_hash"] = config_hash(c);
  m["seed"] = c.seed;
  m["config"] = ojson::parse(config_json(c));
  return m;
}

CommandResult finish(const std::string& dir, const std::string& command,
                     const ExperimentConfig& c, ojson results, bool passed,
                     std::vector<std::string> artifacts) {
  ojson m = manifest(command, c);
  m["passed"] = passed;
  m["results"] = std::move(results);
  m["artifacts"] = artifacts;
  const auto path = join(dir, command + "_manifest.json");
  write_text(path, m.dump(2));
  artifacts.push_back(path);
  return {passed ? 0 : 2, m.dump(2), std::move(artifacts)};
}

std::string side_name(Side s) { return s == Side::left ? "left" : "right"; }

}  // namespace

// ---------------------------------------------------------------------------
// Minimal boundary constant

std::vector<TestFunction> boundary_test_functions(const IBVPProblem& problem) {
  const double T = problem.T, L = problem.b - problem.a;
  auto out = boundary_bumps(problem.a, 0.1 * T, 0.9 * T, 3, 0.2 * L, "left");
  for (auto& f : boundary_bumps(problem.b, 0.1 * T, 0.9 * T, 3, 0.2 * L, "right")) {
    out.push_back(std::move(f));
  }
  out.emplace_back("corner-left", 0.0, 0.4 * T, problem.a, 0.25 * L);
  out.emplace_back("corner-right", 0.0, 0.4 * T, problem.b, 0.25 * L);
  return out;
}

ConstantProbe probe_constant(const SolutionView& view, double c, int k_points,
                             double tol) {
  const double U = view.sup_norm();
  const auto ks = linspace(-U, U, k_points);
  const auto phis = boundary_test_functions(view.problem());
  ResidualOptions ropts;
  ropts.tolerance = tol;
  const std::size_t jobs = ks.size() * phis.size();
  std::vector<ResidualReport> best(jobs);
  parallel_for(jobs, [&](std::size_t j) {
    const double k = ks[j / phis.size()];
    const auto& phi = phis[j % phis.size()];
    auto plus = residual_mv(view, k, Sign::plus, phi, c, ropts);
    auto minus = residual_mv(view, k, Sign::minus, phi, c, ropts);
    best[j] = plus.lhs <= minus.lhs ? std::move(plus) : std::move(minus);
  });
  ConstantProbe p;
  p.c = c;
  p.min_lhs = std::numeric_limits<double>::infinity();
  for (const auto& r : best) {
    if (r.lhs < p.min_lhs) {
      p.min_lhs = r.lhs;
      p.worst_k = r.k;
      p.worst_phi = r.test_function;
      p.worst_sign = std::string(to_string(r.definition));
    }
  }
  p.passed = p.min_lhs >= -tol;
  return p;
}

MinConstantReport min_constant(const SolutionView& view,
                               const MinConstantOptions& opts) {
  MinConstantReport rep;
  rep.k_points = opts.k_points;
  auto run = [&](int k_points) {
    auto probe = [&](double c) {
      auto p = probe_constant(view, c, k_points, opts.tol);
      rep.history.push_back(p);
      ++rep.probes;
      return p;
    };
    const auto top = probe(opts.c_hi);
    if (!top.passed) {
      rep.bracket_valid = false;
      rep.lo = rep.hi = opts.c_hi;
      return std::pair{top, top};
    }
    const auto bottom = probe(opts.c_lo);
    rep.bracket_valid = true;
    if (bottom.passed) {
      rep.lo = rep.hi = opts.c_lo;
      return std::pair{bottom, bottom};
    }
    double lo = opts.c_lo, hi = opts.c_hi;
    ConstantProbe at_lo = bottom, at_hi = top;
    while (hi - lo > opts.c_tol) {
      const double mid = 0.5 * (lo + hi);
      const auto p = probe(mid);
      if (p.passed) {
        hi = mid;
        at_hi = p;
      } else {
        lo = mid;
        at_lo = p;
      }
    }
    rep.lo = lo;
    rep.hi = hi;
    return std::pair{at_lo, at_hi};
  };
  auto [at_lo, at_hi] = run(opts.k_points);
  const double near = 10.0 * opts.tol;
  if (rep.bracket_valid && rep.lo < rep.hi &&
      (std::abs(at_hi.min_lhs) <= near || std::abs(at_lo.min_lhs) <= near)) {
    rep.escalated = true;
    rep.k_points = 2 * opts.k_points - 1;
    run(rep.k_points);
  }
  rep.c_star = 0.5 * (rep.lo + rep.hi);
  return rep;
}

// ---------------------------------------------------------------------------
// Trace margins

TraceMarginReport trace_margins(const IBVPProblem& problem, const Field1D& field,
                                bool richardson) {
  TraceMarginReport rep;
  rep.dx = field.dx;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.late_margin = std::numeric_limits<double>::infinity();
  const double late = std::sqrt(field.dx);
  for (Side side : {Side::left, Side::right}) {
    const auto trace = extract_trace(field, side, richardson);
    const double xi = side == Side::left ? problem.a : problem.b;
    for (std::size_t n = 1; n < trace.size(); ++n) {
      BoundarySample s;
      s.t = trace[n].t;
      s.xi = point1(xi);
      s.nu = point1(side == Side::left ? -1.0 : 1.0);
      s.trace_u = trace[n].value;
      s.datum_ub = side == Side::left ? problem.ub_left(s.t) : problem.ub_right(s.t);
      const double m = check_bln(s, problem.flux).worst_value;
      ++rep.samples;
      if (m < rep.worst_margin) {
        rep.worst_margin = m;
        rep.worst_t = s.t;
        rep.worst_side = side;
      }
      if (s.t >= late) rep.late_margin = std::min(rep.late_margin, m);
      rep.integrated_violation +=
          std::max(0.0, -m) * (field.times[n] - field.times[n - 1]);
    }
  }
  if (!std::isfinite(rep.late_margin)) rep.late_margin = 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Commands

double self_convergence_distance(const Field1D& coarse, const Field1D& fine) {
  if (fine.cells != 2 * coarse.cells) {
    throw Error("self_convergence_distance: fine grid must have twice the cells");
  }
  const auto& uc = coarse.snapshots.back();
  const auto& uf = fine.snapshots.back();
  double e = 0.0;
  for (int i = 0; i < coarse.cells; ++i) {
    e += std::abs(uc[i] - 0.5 * (uf[2 * i] + uf[2 * i + 1]));
  }
  return e * coarse.dx;
}

CommandResult cmd_solve(const ExperimentConfig& c, std::ostream& log) {
  const auto problem = c.problem();
  const auto dir = output_directory(c);
  std::vector<Field1D> fields;
  for (int level = 0; level < 3; ++level) {
    fields.push_back(solve(problem, make_grid(problem, c.cells << level, c.cfl)));
  }
  const Field1D& field = fields.front();
  std::vector<std::string> artifacts = {join(dir, "field.csv"), join(dir, "trace.csv"),
                                        join(dir, "field.bin")};
  write_field_csv(field, artifacts[0]);
  write_trace_csv(field, artifacts[1]);
  write_field_binary(field, artifacts[2]);

  const double d1 = self_convergence_distance(fields[0], fields[1]);
  const double d2 = self_convergence_distance(fields[1], fields[2]);
  const bool exact = d1 <= 1e-14;
  const double rate = exact ? 0.0 : std::log2(d1 / d2);
  const bool rate_ok = exact || rate >= 0.5;
  const bool conservation_ok = field.max_conservation_defect <= 1e-12;
  const bool max_ok = !field.max_principle_checked || field.max_principle_violation == 0.0;

  ojson r;
  r["cells"] = field.cells;
  r["steps"] = field.steps();
  r["max_conservation_defect"] = field.max_conservation_defect;
  r["max_principle_checked"] = field.max_principle_checked;
  r["max_principle_violation"] = field.max_principle_violation;
  r["self_convergence"] = {{"cells", {c.cells, 2 * c.cells, 4 * c.cells}},
                           {"l1_distances", {d1, d2}},
                           {"exact", exact},
                           {"rate", exact ? ojson(nullptr) : ojson(rate)},
                           {"rate_ok", rate_ok}};
  ojson traces;
  for (Side side : {Side::left, Side::right}) {
    const auto tr = extract_trace(field, side);
    double lo = tr.front().value, hi = lo;
    for (const auto& p : tr) {
      lo = std::min(lo, p.value);
      hi = std::max(hi, p.value);
    }
    traces[side_name(side)] = {{"min", lo}, {"max", hi}, {"final", tr.back().value}};
  }
  r["traces"] = traces;
  log << "solve: " << field.steps() << " steps on " << field.cells
      << " cells, conservation defect " << field.max_conservation_defect
      << ", self-convergence "
      << (exact ? std::string("exact") : std::to_string(rate)) << '\n';
  return finish(dir, "solve", c, std::move(r), rate_ok && conservation_ok && max_ok,
                std::move(artifacts));
}

CommandResult cmd_check_boundary(const ExperimentConfig& c, std::ostream& log) {
  const auto flux = make_flux(c.flux);
  BoundarySample s;
  s.t = c.t;
  s.xi = point1(c.xi);
  s.nu = point1(c.nu);
  s.trace_u = c.trace;
  s.datum_ub = c.datum;
  s.validate();
  const auto dir = output_directory(c);
  std::vector<AdmissibilityReport> reports;
  for (const auto& r : check_all(s, flux)) reports.push_back(r);
  reports.push_back(check_strong_bc(s, flux));

  ojson rows = ojson::array();
  bool all = true, any = false;
  log << "condition          verdict       worst value     worst k\n";
  for (const auto& r : reports) {
    all = all && r.admissible;
    any = any || r.admissible;
    char line[160];
    std::snprintf(line, sizeof line, "%-18s %-13s %-15.6g %s\n",
                  std::string(to_string(r.condition)).c_str(),
                  r.admissible ? "admissible" : "VIOLATED", r.worst_value,
                  r.worst_k ? std::to_string(*r.worst_k).c_str() : "-");
    log << line;
    rows.push_back({{"condition", std::string(to_string(r.condition))},
                    {"admissible", r.admissible},
                    {"worst_value", r.worst_value},
                    {"worst_k", r.worst_k ? ojson(*r.worst_k) : ojson(nullptr)},
                    {"witness", r.worst_witness},
                    {"tolerance", r.tolerance}});
  }
  const bool agree = all || !any;
  log << (agree ? "all conditions agree\n" : "conditions DISAGREE\n");
  ojson r;
  r["sample"] = {{"t", s.t}, {"xi", c.xi}, {"nu", c.nu}, {"trace", s.trace_u},
                 {"datum", s.datum_ub}};
  r["conditions"] = rows;
  r["agree"] = agree;
  r["admissible"] = all;
  return finish(dir, "check_boundary", c, std::move(r), all, {});
}

CommandResult cmd_equivalence_sweep(const ExperimentConfig& c, std::ostream& log) {
  const auto flux = make_flux(c.flux);
  SweepOptions opts;
  opts.samples = c.samples;
  opts.seed = c.seed;
  opts.u_bound = c.u_bound;
  opts.box.t_lo = 0.0;
  opts.box.t_hi = c.T;
  opts.box.x_lo = point1(c.a);
  opts.box.x_hi = point1(c.b);
  opts.box.u_bound = c.u_bound;
  opts.check.tol_rel = c.tol;
  for (Condition cond : kSweepConditions) {
    if (!c.fault.empty() && to_string(cond) == c.fault) opts.fault = cond;
  }
  const auto dir = output_directory(c);
  const auto report = equivalence_sweep(flux, opts);
  std::vector<std::string> artifacts = {join(dir, "sweep.json"), join(dir, "sweep.csv")};
  write_text(artifacts[0], report.to_json());
  report.write_csv(artifacts[1]);
  log << "equivalence sweep: " << report.samples << " samples on " << report.flux
      << ", " << report.admissible_count << " admissible, "
      << report.disagreements.size() << " disagreements\n";
  ojson r;
  r["flux"] = report.flux;
  r["samples"] = report.samples;
  r["admissible"] = report.admissible_count;
  r["disagreements"] = report.disagreements.size();
  r["fault"] = c.fault;
  return finish(dir, "equivalence_sweep", c, std::move(r),
                report.disagreements.empty(), std::move(artifacts));
}

CommandResult cmd_min_constant(const ExperimentConfig& c, std::ostream& log) {
  const auto problem = c.problem();
  const auto field = solve(problem, make_grid(problem, c.cells, c.cfl));
  const GridView view(field, problem);
  MinConstantOptions opts;
  opts.c_lo = c.c_lo;
  opts.c_hi = c.c_hi;
  opts.c_tol = c.c_tol;
  opts.k_points = c.min_k_points;
  opts.tol = c.tol;
  const auto dir = output_directory(c);
  const auto rep = min_constant(view, opts);
  const auto at_two = probe_constant(view, 2.0, rep.k_points, c.tol);
  const auto at_half = probe_constant(view, 0.5, rep.k_points, c.tol);

  const auto csv = join(dir, "min_constant_probes.csv");
  {
    std::ofstream out(csv);
    if (!out) throw Error("cannot open '" + csv + "' for writing");
    out.precision(17);
    out << "c,min_lhs,worst_k,worst_test_function,worst_definition,passed\n";
    for (const auto& p : rep.history) {
      out << p.c << ',' << p.min_lhs << ',' << p.worst_k << ',' << p.worst_phi
          << ',' << p.worst_sign << ',' << (p.passed ? 1 : 0) << '\n';
    }
  }
  auto probe_json = [](const ConstantProbe& p) {
    return ojson{{"c", p.c},           {"passed", p.passed},
                 {"min_lhs", p.min_lhs}, {"worst_k", p.worst_k},
                 {"worst_test_function", p.worst_phi},
                 {"worst_definition", p.worst_sign}};
  };
  ojson r;
  r["c_star"] = rep.c_star;
  r["bracket"] = {rep.lo, rep.hi};
  r["bracket_valid"] = rep.bracket_valid;
  r["k_points"] = rep.k_points;
  r["escalated"] = rep.escalated;
  r["probes"] = rep.probes;
  r["probe_c2"] = probe_json(at_two);
  r["probe_c05"] = probe_json(at_half);
  log << "min-constant: c* = " << rep.c_star << " in [" << rep.lo << ", " << rep.hi
      << "] after " << rep.probes << " probes; c = 2 "
      << (at_two.passed ? "passes" : "fails") << ", c = 0.5 "
      << (at_half.passed ? "passes" : "fails at k = " + std::to_string(at_half.worst_k))
      << '\n';
  return finish(dir, "min_constant", c, std::move(r), rep.bracket_valid, {csv});
}

SmoothCandidate exact_candidate(const ExperimentConfig& c) {
  if (c.experiment == "advection") return advection_candidate();
  if (c.u0.kind == DataSpec::Kind::constant) return constant_candidate(c.u0.params[0]);
  throw Error("residuals: no closed-form candidate for experiment '" +
              c.experiment + "'");
}

CommandResult cmd_residuals(const ExperimentConfig& c, std::ostream& log) {
  const auto problem = c.problem();
  const auto dir = output_directory(c);
  std::unique_ptr<SolutionView> view;
  Field1D field;
  double slack = 0.0;
  if (c.field == "solve") {
    field = solve(problem, make_grid(problem, c.cells, c.cfl));
    view = std::make_unique<GridView>(field, problem);
    slack = c.slack;
  } else {
    view = std::make_unique<SmoothView>(exact_candidate(c), problem);
  }
  std::vector<std::pair<std::string, Definition>> defs = {
      {"re", Definition::re}, {"mv+", Definition::mv_plus},
      {"mv-", Definition::mv_minus}, {"e", Definition::e}, {"bln", Definition::bln}};
  if (c.definition != "all") {
    std::erase_if(defs, [&](const auto& d) { return d.first != c.definition; });
  }
  DefinitionSweepOptions opts;
  opts.ks = definition_k_grid(*view, c.k_points);
  opts.pair_index = c.pair_index;
  opts.residual.tolerance = c.tol;
  opts.residual.slack_coeff = slack;

  ojson r;
  r["field"] = c.field;
  r["slack"] = slack;
  r["mesh_width"] = view->mesh_width();
  std::vector<std::string> artifacts;
  bool passed = true;
  for (const auto& [name, def] : defs) {
    const auto summary = definition_sweep(*view, def, opts);
    std::string stem = name;
    if (stem.back() == '+') stem = stem.substr(0, stem.size() - 1) + "_plus";
    if (stem.back() == '-') stem = stem.substr(0, stem.size() - 1) + "_minus";
    artifacts.push_back(join(dir, "residuals_" + stem + ".csv"));
    write_residual_csv(summary, artifacts.back());
    artifacts.push_back(join(dir, "surface_" + stem + ".csv"));
    write_residual_surface(summary, artifacts.back());
    r[name] = ojson::parse(residual_summary_json(summary));
    passed = passed && summary.passed();
    log << "residuals " << name << ": " << summary.reports.size()
        << " evaluations, min lhs " << summary.min_lhs
        << (summary.passed() ? "" : "  VIOLATED") << '\n';
  }
  return finish(dir, "residuals", c, std::move(r), passed, std::move(artifacts));
}

CommandResult cmd_verify_pairs(const ExperimentConfig& c, std::ostream& log) {
  const auto flux = make_flux(c.flux);
  const auto dir = output_directory(c);
  SampleBox box;
  box.t_hi = c.T;
  box.x_lo = point1(c.a);
  box.x_hi = point1(c.b);
  box.u_bound = c.u_bound;
  const double k = 0.3;
  std::vector<PropertyReport> reports;
  reports.push_back(verify_flux(flux, 1000, box));
  for (const auto& p :
       {kruzkov_pair(flux, k), kruzkov_pair_quadrature(flux, k),
        semi_kruzkov_pair(flux, k, Sign::plus), semi_kruzkov_pair(flux, k, Sign::minus),
        quadratic_pair(flux, k), smooth_abs_family(flux, k, 10),
        smooth_abs_family(flux, k, 100)}) {
    reports.push_back(verify_entropy_pair(p, flux, 1000, box));
  }
  for (const auto& p :
       {smoothed_semi_pair(flux, Sign::plus, 10), smoothed_semi_pair(flux, Sign::minus, 10),
        smoothed_semi_pair(flux, Sign::plus, 100), distance_pair_family(flux, k, 20),
        distance_pair_limit(flux, k)}) {
    reports.push_back(verify_boundary_pair(p, flux, 1000, box));
  }
  reports.push_back(
      verify_boundary_pair(shifted_pair_family(kruzkov_pair(flux, k), flux, k, 10), flux,
                           100, box));

  ojson rows = ojson::array();
  bool passed = true;
  for (const auto& rep : reports) {
    passed = passed && rep.passed();
    ojson checks = ojson::array();
    for (const auto& ch : rep.checks) {
      checks.push_back({{"name", ch.name},
                        {"max_violation", ch.max_violation},
                        {"tolerance", ch.tolerance},
                        {"passed", ch.passed}});
    }
    rows.push_back({{"subject", rep.subject},
                    {"samples", rep.samples},
                    {"passed", rep.passed()},
                    {"checks", checks}});
    log << (rep.passed() ? "ok    " : "FAIL  ") << rep.subject << '\n';
  }
  ojson r;
  r["flux"] = flux.name();
  r["reports"] = rows;
  return finish(dir, "verify_pairs", c, std::move(r), passed, {});
}

}  // namespace ibvp

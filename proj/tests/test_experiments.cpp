#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ibvp/experiments.hpp"
#include "ibvp/fixtures.hpp"
#include "json.hpp"

using namespace ibvp;

namespace {

struct OutputDir {
  std::filesystem::path path;
  OutputDir() {
    path = std::filesystem::temp_directory_path() / "ibvp_experiments_test";
    std::filesystem::remove_all(path);
    setenv("IBVP_OUTPUT_DIR", path.c_str(), 1);
  }
  ~OutputDir() {
    unsetenv("IBVP_OUTPUT_DIR");
    std::filesystem::remove_all(path);
  }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest_of(const CommandResult& r) {
  return nlohmann::json::parse(r.summary);
}

}  // namespace

TEST_CASE("output directory honours the environment override") {
  OutputDir dir;
  auto c = preset_config("reference");
  CHECK(output_directory(c) == (dir.path / "reference").string());
  CHECK(std::filesystem::is_directory(dir.path / "reference"));
}

TEST_CASE("solve command on the reference problem") {
  OutputDir dir;
  std::ostringstream log;
  auto c = preset_config("reference");
  c.cells = 50;
  const auto r = cmd_solve(c, log);
  CHECK(r.exit_code == 0);
  const auto m = manifest_of(r);
  CHECK(m["config_hash"] == config_hash(c));
  CHECK(m["seed"] == 1);
  CHECK(m["version"] == std::string(kToolVersion));
  CHECK(m["results"]["self_convergence"]["exact"] == true);
  CHECK(m["results"]["traces"]["left"]["min"] == 1.0);
  CHECK(m["results"]["traces"]["right"]["max"] == 1.0);
  const auto field = read_field_binary((dir.path / "reference" / "field.bin").string());
  for (double v : field.snapshots.back()) CHECK(v == 1.0);
}

TEST_CASE("solve command records self-convergence") {
  OutputDir dir;
  std::ostringstream log;
  auto c = preset_config("advection");
  c.cells = 100;
  const auto r = cmd_solve(c, log);
  CHECK(r.exit_code == 0);
  const auto sc = manifest_of(r)["results"]["self_convergence"];
  CHECK(sc["exact"] == false);
  CHECK(sc["rate"].get<double>() >= 0.5);
}

TEST_CASE("check-boundary command") {
  OutputDir dir;
  std::ostringstream log;
  auto ok = cmd_check_boundary(preset_config("reference"), log);
  CHECK(ok.exit_code == 0);
  CHECK(log.str().find("all conditions agree") != std::string::npos);
  auto bad = cmd_check_boundary(preset_config("inadmissible"), log);
  CHECK(bad.exit_code == 2);
  CHECK(manifest_of(bad)["results"]["agree"] == true);
  CHECK(manifest_of(bad)["results"]["conditions"].size() == 6);
}

TEST_CASE("equivalence sweep command is deterministic and detects faults") {
  OutputDir dir;
  std::ostringstream log;
  auto c = preset_config("reference");
  c.samples = 200;
  const auto r1 = cmd_equivalence_sweep(c, log);
  CHECK(r1.exit_code == 0);
  const auto first = slurp(r1.artifacts[0]);
  const auto r2 = cmd_equivalence_sweep(c, log);
  CHECK(slurp(r2.artifacts[0]) == first);
  c.fault = "zero-entropy";
  CHECK(cmd_equivalence_sweep(c, log).exit_code == 2);
}

TEST_CASE("minimal constant on the reference problem") {
  const auto p = reference_problem();
  const auto field = solve(p, make_grid(p, 200));
  const GridView view(field, p);
  const auto rep = min_constant(view);
  CHECK(rep.bracket_valid);
  CHECK(rep.hi - rep.lo <= 0.02);
  CHECK(rep.c_star >= 0.98);
  CHECK(rep.c_star <= 1.02);
  CHECK(probe_constant(view, 2.0, 257, 1e-9).passed);
  const auto half = probe_constant(view, 0.5, 257, 1e-9);
  CHECK_FALSE(half.passed);
  CHECK(half.worst_k > 0.0);
  CHECK(half.worst_k < 1.0);
  MinConstantOptions narrow;
  narrow.c_lo = 1.5;
  CHECK(min_constant(view, narrow).c_star == 1.5);
  narrow.c_lo = 0.0;
  narrow.c_hi = 0.5;
  CHECK_FALSE(min_constant(view, narrow).bracket_valid);
}

TEST_CASE("residuals command") {
  OutputDir dir;
  std::ostringstream log;
  auto c = preset_config("reference");
  c.cells = 60;
  CHECK(cmd_residuals(c, log).exit_code == 0);
  auto bad = preset_config("inadmissible");
  bad.field = "exact";
  bad.definition = "bln";
  const auto r = cmd_residuals(bad, log);
  CHECK(r.exit_code == 2);
  const auto surface = slurp((dir.path / "inadmissible" / "surface_bln.csv").string());
  CHECK(surface.rfind("k,", 0) == 0);
  auto riemann = preset_config("inflow-shock");
  riemann.definition = "bln";
  riemann.cells = 100;
  CHECK(cmd_residuals(riemann, log).exit_code == 0);
  riemann.slack = 0.0;
  CHECK(cmd_residuals(riemann, log).exit_code == 2);
  auto no_candidate = preset_config("reference");
  no_candidate.field = "exact";
  no_candidate.u0 = DataSpec::parse("step:0.5:1:0");
  CHECK_THROWS_AS(cmd_residuals(no_candidate, log), Error);
}

TEST_CASE("verify-pairs command") {
  OutputDir dir;
  std::ostringstream log;
  for (const char* flux : {"burgers", "linear:1", "buckley-leverett"}) {
    auto c = preset_config("reference");
    c.flux = flux;
    CHECK(cmd_verify_pairs(c, log).exit_code == 0);
  }
}

TEST_CASE("trace margins on an outflow fixture are exact") {
  const auto suite = boundary_riemann_suite();
  const auto p = boundary_riemann_problem(suite[0]);
  const auto field = solve(p, make_grid(p, 100));
  const auto rep = trace_margins(p, field);
  CHECK(rep.samples == 2 * field.steps());
  CHECK(rep.worst_margin == 0.0);
  CHECK(rep.integrated_violation == 0.0);
}

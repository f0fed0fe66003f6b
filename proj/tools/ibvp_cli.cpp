// Command-line front end: ibvp <subcommand> [options]
//
//   solve | check-boundary | equivalence-sweep | min-constant | residuals |
//   verify-pairs
//
// The base configuration comes from --preset (default "reference") or an
// INI file given with --config; flags override individual keys. Exit codes:
// 0 all verdicts pass, 2 a verdict failed, 1 usage or configuration error.
// IBVP_OUTPUT_DIR overrides the output directory.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ibvp/config.hpp"
#include "ibvp/experiments.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string preset = "reference";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> grid;
  std::optional<std::string> flux;
  std::optional<int> samples;
  std::optional<std::string> fault;
  std::optional<std::string> definition;
  std::optional<std::string> field;
  std::optional<double> slack;
  std::optional<double> trace, datum, nu;
  std::optional<std::string> output_dir;
  std::string export_json;
  bool print_config = false;
};

ibvp::ExperimentConfig resolve(const Overrides& o) {
  ibvp::ExperimentConfig c = o.config_path.empty() ? ibvp::preset_config(o.preset)
                                                   : ibvp::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.tol) c.tol = *o.tol;
  if (o.grid) c.cells = *o.grid;
  if (o.flux) c.flux = *o.flux;
  if (o.samples) c.samples = *o.samples;
  if (o.fault) c.fault = *o.fault;
  if (o.definition) c.definition = *o.definition;
  if (o.field) c.field = *o.field;
  if (o.slack) c.slack = *o.slack;
  if (o.trace) c.trace = *o.trace;
  if (o.datum) c.datum = *o.datum;
  if (o.nu) c.nu = *o.nu;
  if (o.output_dir) c.output_dir = *o.output_dir;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-solution experiments for scalar balance laws on a bounded interval"};
  app.require_subcommand(1);
  Overrides o;

  app.add_option("--config", o.config_path, "INI configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--preset", o.preset, "built-in configuration")
      ->check(CLI::IsMember(ibvp::preset_names()));
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--tol", o.tol, "verdict tolerance");
  app.add_option("--grid", o.grid, "number of cells")->check(CLI::PositiveNumber);
  app.add_option("--flux", o.flux, "flux catalog name");
  app.add_option("--out", o.output_dir, "output directory");
  app.add_option("--export-config", o.export_json,
                 "write the resolved configuration as JSON to this file");
  app.add_flag("--print-config", o.print_config, "print the resolved INI and exit");

  auto* solve = app.add_subcommand("solve", "run the Godunov solver and write the field");
  auto* check = app.add_subcommand("check-boundary", "pointwise boundary conditions on one sample");
  check->add_option("--trace", o.trace, "boundary trace value");
  check->add_option("--datum", o.datum, "boundary datum");
  check->add_option("--nu", o.nu, "outward normal (+1 or -1)");
  auto* sweep = app.add_subcommand("equivalence-sweep", "random agreement sweep of the five conditions");
  sweep->add_option("--samples", o.samples, "number of samples")->check(CLI::PositiveNumber);
  sweep->add_option("--fault", o.fault, "negate the margins of one condition");
  auto* minc = app.add_subcommand("min-constant", "smallest boundary multiplier");
  auto* resid = app.add_subcommand("residuals", "integral residual sweeps");
  resid->add_option("--definition", o.definition, "re, mv+, mv-, e, bln or all");
  resid->add_option("--field", o.field, "solve or exact");
  resid->add_option("--slack", o.slack, "scheme slack coefficient");
  auto* pairs = app.add_subcommand("verify-pairs", "property checks of the entropy pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto cfg = resolve(o);
    if (o.print_config) {
      std::cout << ibvp::serialize_config(cfg);
      return 0;
    }
    if (!o.export_json.empty()) {
      std::ofstream out(o.export_json);
      if (!out) throw ibvp::Error("cannot open '" + o.export_json + "'");
      out << ibvp::config_json(cfg) << '\n';
    }
    ibvp::CommandResult r;
    if (solve->parsed()) r = ibvp::cmd_solve(cfg, std::cout);
    else if (check->parsed()) r = ibvp::cmd_check_boundary(cfg, std::cout);
    else if (sweep->parsed()) r = ibvp::cmd_equivalence_sweep(cfg, std::cout);
    else if (minc->parsed()) r = ibvp::cmd_min_constant(cfg, std::cout);
    else if (resid->parsed()) r = ibvp::cmd_residuals(cfg, std::cout);
    else if (pairs->parsed()) r = ibvp::cmd_verify_pairs(cfg, std::cout);
    for (const auto& a : r.artifacts) std::cout << "wrote " << a << '\n';
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

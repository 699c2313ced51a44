// twophoton: command-line front end.
//
//   twophoton simulate  [--config FILE] [--out DIR] [--check] [--linear-only] [--key value ...]
//   twophoton g2        ...
//   twophoton oracle    ...
//   twophoton decompose ...
//   twophoton compare A.csv B.csv [--check] [--check.tolerance T]
//
// Exit codes: 0 ok, 2 configuration error, 3 tolerance failure under
// --check, 4 I/O error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"

using namespace twophoton;
using namespace twophoton::cli;

namespace {

struct SubArgs {
  std::string config;
  std::string out;
  bool check = false;
  bool linear_only = false;
};

CLI::App* add_run_command(CLI::App& app, const std::string& name, const std::string& help, SubArgs& a,
                          bool linear_flag) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--config", a.config, "key = value configuration file");
  sub->add_option("--out", a.out, "output directory (overrides the out key)");
  sub->add_flag("--check", a.check, "exit 3 when the command's tolerance check fails");
  if (linear_flag) sub->add_flag("--linear-only", a.linear_only, "drop the nonlinear correction");
  sub->allow_extras();
  sub->footer("Any configuration key may be overridden as --key value, e.g. --pulse.length 40.");
  return sub;
}

RunConfig load(const SubArgs& a, const std::vector<std::string>& extras) {
  std::map<std::string, std::string> kv;
  if (!a.config.empty()) kv = read_config_file(a.config);
  apply_overrides(kv, extras);
  if (!a.out.empty()) kv["out"] = a.out;
  return build_config(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon scattering on a two-level atom in a one-dimensional waveguide"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  SubArgs sim_a, g2_a, orc_a, dec_a;
  auto* sim = add_run_command(app, "simulate", "two-photon output grids (total, linear, nonlinear)", sim_a, false);
  auto* g2 = add_run_command(app, "g2", "normalized second-order correlation slice and its zeros", g2_a, true);
  auto* orc = add_run_command(app, "oracle", "lab-frame integrator compared with the scattering map", orc_a, false);
  auto* dec = add_run_command(app, "decompose", "output split by interaction process", dec_a, false);

  std::string file_a, file_b;
  bool cmp_check = false;
  auto* cmp = app.add_subcommand("compare", "max-abs and relative L2 difference of two grid CSVs");
  cmp->add_option("a", file_a, "first CSV")->required();
  cmp->add_option("b", file_b, "second CSV (reference for rel_l2)")->required();
  cmp->add_flag("--check", cmp_check, "exit 3 when max_abs exceeds check.tolerance (default 1e-10)");
  cmp->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : config_error;
  }

  try {
    if (*cmp) {
      std::map<std::string, std::string> kv;
      apply_overrides(kv, cmp->remaining());
      const RunConfig cfg = build_config(kv);
      return cmd_compare(file_a, file_b, cfg.check_tolerance > 0 ? cfg.check_tolerance : 1e-10,
                         CommandOptions{cmp_check, false});
    }
    if (*sim) return cmd_simulate(load(sim_a, sim->remaining()), {sim_a.check, false});
    if (*g2) return cmd_g2(load(g2_a, g2->remaining()), {g2_a.check, g2_a.linear_only});
    if (*orc) return cmd_oracle(load(orc_a, orc->remaining()), {orc_a.check, false});
    if (*dec) return cmd_decompose(load(dec_a, dec->remaining()), {dec_a.check, false});
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return io_error;
  } catch (const CsvError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return io_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return config_error;
}

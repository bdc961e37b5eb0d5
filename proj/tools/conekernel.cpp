// Command-line front end: conekernel {eval,scan,critical,decay-fit,verify}.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "conekernel/cli_io.hpp"

namespace ck = conekernel;

namespace {

struct Flags {
  std::optional<double> rho;
  std::optional<int> n;
  std::optional<double> c;
  std::optional<double> x_min, x_max;
  std::optional<int> x_points;
  std::optional<std::string> x_scale;
  std::optional<std::string> phi_list;
  std::optional<std::string> phi0;
  std::optional<double> eps0;
  std::optional<std::string> preset;
  std::optional<std::string> bound;
  std::optional<std::string> config;
  std::string dump_config;
};

void add_params(CLI::App* cmd, Flags& f) {
  cmd->add_option("--rho", f.rho, "Cross-section scale rho > 0");
  cmd->add_option("--n", f.n, "Ambient dimension n >= 3");
  cmd->add_option("--c", f.c, "Inverse-square coupling, c > -(n-2)^2/4");
}

void add_grid(CLI::App* cmd, Flags& f) {
  cmd->add_option("--x-min", f.x_min, "Smallest x of the grid");
  cmd->add_option("--x-max", f.x_max, "Largest x of the grid");
  cmd->add_option("--x-points", f.x_points, "Number of x values");
  cmd->add_option("--x-scale", f.x_scale, "Grid spacing: log or lin")->check(CLI::IsMember({"log", "lin"}));
  cmd->add_option("--phi-list", f.phi_list, "Comma-separated angles (numbers, pi, pi/2, 3pi/4, pi-0.4)");
}

void add_common(CLI::App* cmd, Flags& f, ck::RunConfig& cfg) {
  cmd->add_option("--tol", cfg.tol, "Truncation tolerance")->capture_default_str();
  cmd->add_option("--preset", f.preset, "Named experiment")->check(CLI::IsMember(ck::preset_names()));
  cmd->add_option("--config", f.config, "Read a RunConfig JSON file (flags override it)");
  cmd->add_option("--dump-config", f.dump_config, "Write the effective RunConfig JSON to this path");
}

void add_output(CLI::App* cmd, ck::RunConfig& cfg) {
  cmd->add_option("--output,-o", cfg.output_path, "Output file ('-' for standard output)")->capture_default_str();
}

void add_workers(CLI::App* cmd, ck::RunConfig& cfg) {
  cmd->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_phi0(CLI::App* cmd, Flags& f) {
  cmd->add_option("--phi0", f.phi0, "Conjugate angle: exactly 0 or pi");
}

// Layers config file, preset and explicit flags, in that order. Options bound
// directly into `cli` are copied over when they were given on the command line.
ck::RunConfig resolve(const ck::RunConfig& cli, const Flags& f, const CLI::App& sub) {
  ck::RunConfig cfg = cli;
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw ck::IoError("cannot read config '" + *f.config + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ck::InputError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = ck::run_config_from_json(j);
    auto given = [&](const char* name) {
      const CLI::Option* opt = sub.get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--tol")) cfg.tol = cli.tol;
    if (given("--output")) cfg.output_path = cli.output_path;
    if (given("--workers")) cfg.workers = cli.workers;
    if (given("--with-prediction")) cfg.with_prediction = cli.with_prediction;
    if (given("--threshold")) cfg.threshold = cli.threshold;
    if (given("--bins-per-octave")) cfg.bins_per_octave = cli.bins_per_octave;
    if (given("--freq-x0")) cfg.frequency.x0 = cli.frequency.x0;
    if (given("--freq-step")) cfg.frequency.step = cli.frequency.step;
    if (given("--freq-points")) cfg.frequency.points = cli.frequency.points;
  }
  const std::string command = sub.get_name();
  cfg.command = command;
  if (f.eps0) cfg.eps0 = *f.eps0;
  if (f.preset) ck::apply_preset(cfg, *f.preset);
  if (f.rho || f.n || f.c) {
    cfg.params = ck::ConeParams(f.rho.value_or(cfg.params.rho()), f.n.value_or(cfg.params.n()),
                                f.c.value_or(cfg.params.c()));
  }
  if (f.x_min) cfg.x_grid.min = *f.x_min;
  if (f.x_max) cfg.x_grid.max = *f.x_max;
  if (f.x_points) cfg.x_grid.points = *f.x_points;
  if (f.x_scale) cfg.x_grid.scale = *f.x_scale;
  if (f.phi_list) {
    cfg.phi_list = ck::parse_angle_list(*f.phi_list);
    cfg.phi0.reset();
  } else if (f.eps0 && cfg.preset == "interior-bounded") {
    cfg.phi_list = ck::interior_angles(cfg.eps0);
  }
  if (f.phi0) cfg.phi0 = ck::parse_conjugate_angle(*f.phi0);
  if (f.bound) cfg.bound = ck::bound_kind_from_string(*f.bound);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bessel-Gegenbauer series of the Schroedinger kernel on product cones"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  ck::RunConfig cfg;
  Flags f;
  std::string eval_phi;

  auto* eval = app.add_subcommand("eval", "Evaluate I(x, phi), or the kernel with --physical");
  add_params(eval, f);
  eval->add_option("--x", cfg.eval.x, "Spectral variable x = r1 r2 / (2t)");
  eval->add_option("--phi", eval_phi, "Angle in [0, pi]");
  eval->add_flag("--physical", cfg.eval.physical, "Evaluate the kernel at (t, r1, r2, phi)");
  eval->add_option("--t", cfg.eval.t, "Time t > 0");
  eval->add_option("--r1", cfg.eval.r1, "Radius r1 > 0");
  eval->add_option("--r2", cfg.eval.r2, "Radius r2 > 0");
  eval->add_option("--tol", cfg.tol, "Truncation tolerance")->capture_default_str();
  add_output(eval, cfg);

  auto* scan = app.add_subcommand("scan", "Evaluate I on an (x, phi) grid and write CSV");
  add_params(scan, f);
  add_grid(scan, f);
  add_phi0(scan, f);
  add_common(scan, f, cfg);
  add_output(scan, cfg);
  add_workers(scan, cfg);
  scan->add_flag("--with-prediction", cfg.with_prediction, "Attach principal-term predictions at phi in {0, pi}");

  auto* critical = app.add_subcommand("critical", "Enumerate critical sets (--phi-list) or conjugate frequencies (--phi0)");
  add_params(critical, f);
  critical->add_option("--phi-list", f.phi_list, "Comma-separated angles");
  add_phi0(critical, f);
  add_output(critical, cfg);

  auto* fit = app.add_subcommand("decay-fit", "Fit growth exponents and extract oscillation frequencies");
  add_params(fit, f);
  add_grid(fit, f);
  add_phi0(fit, f);
  add_common(fit, f, cfg);
  add_output(fit, cfg);
  add_workers(fit, cfg);
  fit->add_option("--bins-per-octave", cfg.bins_per_octave, "Upper-envelope bins per octave")->capture_default_str();
  fit->add_option("--freq-x0", cfg.frequency.x0, "First x of the uniform frequency grid");
  fit->add_option("--freq-step", cfg.frequency.step, "Spacing of the frequency grid");
  fit->add_option("--freq-points", cfg.frequency.points, "Samples on the frequency grid (0 disables)");
  fit->add_option("--eps0", f.eps0, "Interior-angle margin for the interior-bounded preset");

  auto* verify = app.add_subcommand("verify", "Check |I| against a decay envelope; exit 1 when the bound fails");
  add_params(verify, f);
  add_grid(verify, f);
  add_phi0(verify, f);
  add_common(verify, f, cfg);
  add_output(verify, cfg);
  add_workers(verify, cfg);
  verify->add_option("--bound", f.bound, "interior, general or smallx")
      ->check(CLI::IsMember({"interior", "general", "smallx"}));
  verify->add_option("--threshold", cfg.threshold, "Largest accepted sup ratio")->capture_default_str();
  verify->add_option("--eps0", f.eps0, "Interior-angle margin for the interior-bounded preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ck::exit_code::kInvalidInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  ck::RunConfig effective;
  try {
    effective = resolve(cfg, f, *app.get_subcommands().front());
    if (command == "eval" && !eval_phi.empty()) effective.eval.phi = ck::parse_angle(eval_phi);
    if (!f.dump_config.empty()) {
      std::ofstream out(f.dump_config);
      if (!out) throw ck::IoError("cannot write config '" + f.dump_config + "'");
      out << ck::run_config_to_json(effective).dump(2) << '\n';
    }
  } catch (const ck::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return ck::exit_code::kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return ck::exit_code::kInvalidInput;
  }
  return ck::run_command(effective, std::cout, std::cerr);
}

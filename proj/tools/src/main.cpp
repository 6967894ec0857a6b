#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ddae_cli/commands.hpp"

namespace cli = ddae::cli;

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain analysis of delay differential algebraic systems"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: DDAE_NUM_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  std::vector<double> delays;
  auto delay_option = [&](CLI::App* sub) {
    return sub->add_option("--delays", delays, "Override the delays (comma separated)")->delimiter(',');
  };

  cli::CheckArgs check;
  auto* c_check = app.add_subcommand("check", "Validate a system file");
  c_check->add_option("file", check.file, "SystemFile JSON")->required();
  c_check->add_flag("--json", check.json, "JSON report");
  c_check->add_option("--grid-per-dim", check.grid_per_dim, "Torus resolution for gamma_a");

  cli::SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Singular values of T or Ta on a grid");
  c_sweep->add_option("file", sweep.file, "SystemFile JSON")->required();
  c_sweep->add_option("--which", sweep.which, "T or Ta")->check(CLI::IsMember({"T", "Ta"}));
  c_sweep->add_option("--grid", sweep.grid, "lin:MIN:MAX:COUNT or log:MIN:MAX:COUNT");
  c_sweep->add_option("--torus", sweep.torus, "Sweep Ta over a uniform torus grid with N points per axis");
  c_sweep->add_option("--out", sweep.out, "Output path, - for stdout");
  c_sweep->add_option("--format", sweep.format, "csv or json (default from extension)");
  auto* sweep_delays = delay_option(c_sweep);

  cli::NormArgs norm;
  auto* c_norm = app.add_subcommand("norm", "H-infinity norms");
  c_norm->add_option("file", norm.file, "SystemFile JSON")->required();
  c_norm->add_option("--kind", norm.kind, "hinf, strong-ta or strong")
      ->check(CLI::IsMember({"hinf", "strong-ta", "strong"}));
  c_norm->add_option("--tol", norm.tol, "Relative tolerance");
  c_norm->add_flag("--json", norm.json, "JSON report");
  c_norm->add_option("--omega-cap", norm.omega_cap, "Override the frequency scan limit");
  c_norm->add_option("--grid-per-dim", norm.grid_per_dim, "Torus resolution");
  auto* norm_delays = delay_option(c_norm);

  cli::PerturbArgs perturb;
  auto* c_perturb = app.add_subcommand("perturb", "Norms at delays sampled near the nominal ones");
  c_perturb->add_option("file", perturb.file, "SystemFile JSON")->required();
  c_perturb->add_option("--epsilon", perturb.epsilon, "Ball radius")->required();
  c_perturb->add_option("--scheme", perturb.scheme, "deterministic-rational or random-uniform")
      ->check(CLI::IsMember({"deterministic-rational", "random-uniform"}));
  c_perturb->add_option("--count", perturb.count, "Number of samples");
  c_perturb->add_option("--seed", perturb.seed, "Seed for random-uniform");
  c_perturb->add_option("--max-denominator", perturb.max_denominator, "Largest denominator tried");
  c_perturb->add_option("--tol", perturb.tol, "Relative tolerance of each norm");
  c_perturb->add_option("--out", perturb.out, "Output path, - for stdout");
  c_perturb->add_option("--format", perturb.format, "csv or json (default from extension)");
  auto* perturb_delays = delay_option(c_perturb);

  cli::BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build a system file from an interconnection file");
  c_build->add_option("file", build.file, "InterconnectFile JSON")->required();
  c_build->add_option("--out", build.out, "Output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  if (threads > 0) setenv("DDAE_NUM_THREADS", std::to_string(threads).c_str(), 1);
  auto given = [&](CLI::Option* opt) { return opt->count() > 0 ? std::optional(delays) : std::nullopt; };

  if (c_check->parsed()) return cli::run_check(check, std::cout, std::cerr);
  if (c_sweep->parsed()) {
    sweep.delays = given(sweep_delays);
    return cli::run_sweep(sweep, std::cout, std::cerr);
  }
  if (c_norm->parsed()) {
    norm.delays = given(norm_delays);
    return cli::run_norm(norm, std::cout, std::cerr);
  }
  if (c_perturb->parsed()) {
    perturb.delays = given(perturb_delays);
    return cli::run_perturb(perturb, std::cout, std::cerr);
  }
  return cli::run_build(build, std::cout, std::cerr);
}

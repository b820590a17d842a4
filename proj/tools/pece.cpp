/**
 * @file pece.cpp
 * @brief Command-line front end: run, preset, verify-stencils, convergence.
 */
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pece/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-step PECE integrators with step-size control"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "integrate the problem described by a config file");
  run->add_option("config", config_path, "key = value config file")->required();

  std::string preset_name;
  std::string tol, n_global, t_end, ic, variant, m, fixed, amplitude, output_dir;
  auto* preset = app.add_subcommand("preset", "integrate a named preset");
  preset->add_option("name", preset_name,
                     "brusselator-limit-cycle, brusselator-stiff or fsae-bumps")
      ->required();
  preset->add_option("--tol", tol, "error tolerance");
  preset->add_option("--N", n_global, "number of global steps");
  preset->add_option("--T", t_end, "end time");
  preset->add_option("--ic", ic, "initial condition, comma separated");
  preset->add_option("--variant", variant, "corrector variant: averaged, type1, type2");
  preset->add_option("--m", m, "corrector passes");
  preset->add_option("--fixed", fixed, "fixed local steps per global step");
  preset->add_option("--amplitude", amplitude, "roadway bump height in inches");
  preset->add_option("--out", output_dir, "output directory");

  app.add_subcommand("verify-stencils", "print the order analysis of every catalogued formula");

  std::string family, conv_variant, problem, conv_out = "pece-out";
  auto* conv = app.add_subcommand("convergence", "measure convergence order on a closed-form problem");
  conv->add_option("family", family, "first-order, kinematic, dynamic, or startup-<family>")
      ->required();
  conv->add_option("variant", conv_variant, "averaged, type1, type2")->required();
  conv->add_option("problem", problem, "exp-decay, harmonic, forced-linear")->required();
  conv->add_option("--out", conv_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  using namespace pece::cli;
  try {
    if (*run) {
      return cmd_run(load_config(config_path), std::cout, std::cerr);
    }
    if (*preset) {
      RunConfig cfg;
      apply_setting(cfg, "problem", preset_name, "preset");
      const std::pair<const char*, const std::string*> overrides[] = {
          {"tol", &tol},     {"N", &n_global},  {"T", &t_end},
          {"ic", &ic},       {"variant", &variant}, {"m", &m},
          {"fixed_substeps", &fixed}, {"amplitude_in", &amplitude},
          {"output_dir", &output_dir}};
      for (const auto& [key, value] : overrides) {
        if (!value->empty()) apply_setting(cfg, key, *value, "--" + std::string(key));
      }
      return cmd_run(cfg, std::cout, std::cerr);
    }
    if (app.got_subcommand("verify-stencils")) {
      return cmd_verify_stencils(std::cout);
    }
    if (*conv) {
      return cmd_convergence(family, conv_variant, problem, conv_out, std::cout, std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

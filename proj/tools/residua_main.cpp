#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "residua/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "residua - structure-preserving partial evaluator for MiniF77 programs"};

  residua::RunConfig config;
  app.add_option("--src", config.sources,
                 "Source .f files or directories (one unit per file)")
      ->required()
      ->expected(-1);
  app.add_option("--constraints", config.constraints_path,
                 "Constraint file (.pec) with GLOBAL/UNIT equality bindings");
  app.add_option("--policy", config.policy,
                 "Replacement policy: all | none | keep:<file>")
      ->default_val("all");
  app.add_option("--out", config.out_dir, "Output directory")->default_val("out");
  app.add_option("--emit", config.emit, "What to write: report | program | both")
      ->default_val("report")
      ->check(CLI::IsMember({"report", "program", "both"}));
  app.add_option("--report-format", config.report_format, "json | html | both")
      ->default_val("both")
      ->check(CLI::IsMember({"json", "html", "both"}));
  app.add_option("--variant-cap", config.variant_cap,
                 "Maximum specialized variants per procedure")
      ->default_val(64);
  app.add_option("--trials", config.trials, "Differential-test trials before emitting")
      ->default_val(200);
  app.add_option("--seed", config.seed, "Differential-test seed")->default_val(1);
  app.add_option("--fuel", config.fuel, "Interpreter step budget per trial")
      ->default_val(1000000);
  app.add_flag("--unchecked", config.unchecked,
               "Skip the differential test before emitting the residual program");
  int mutate = -1;
  app.add_option("--debug-mutate", mutate, "Corrupt the residual statement with this "
                                           "ProvId before verification (testing aid)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : residua::kExitInputError;
  }
  if (mutate >= 0) config.debug_mutate = mutate;

  if (const char* env_seed = std::getenv("RESIDUA_SEED")) {
    config.seed = std::strtoull(env_seed, nullptr, 10);
  }

  return residua::run_pipeline(config, std::cout, std::cerr);
}

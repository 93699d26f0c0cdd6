// Command-line driver: certificate emission, sampled lemma verification,
// and the micro-scale connecting demo. See commands.hpp for the exit-code
// and file-format contract.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wander/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"certified p-adic wandering-domain toolkit"};
  app.require_subcommand(1);

  wander::commands::Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--prime", opt.prime, "base prime p");
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--out", opt.out, "output file path");
    cmd->add_option("--precision", opt.precision,
                    "working absolute precision");
  };

  auto* certify =
      app.add_subcommand("certify", "synthesize a stage plan and emit "
                                    "certificate.json with exact margins");
  add_common(certify);
  certify->add_option("--horizon", opt.horizon, "number of log-radii J");
  certify->add_option("--stages", opt.stages, "number of stages K");
  certify->add_option("--eps-bar", opt.eps_bar,
                      "log_p of the per-stage epsilon bound (rational)");

  auto* verify = app.add_subcommand(
      "verify", "run sampled lemma checks and emit report.json");
  add_common(verify);
  verify->add_option("--horizon", opt.horizon,
                     "number of log-radii J (default 4 for verify)");
  verify->add_option("--lemma", opt.lemma,
                     "norms|perturbation|partials|stability|uniform|all");
  verify->add_option("--trials", opt.trials, "samples per check");
  verify->add_option("--drop-factor", opt.drop_factor,
                     "omit product factor j (tampered negative control)");

  auto* connect = app.add_subcommand(
      "connect-demo", "seed point + one-parameter connection; emits "
                      "transcript.json");
  add_common(connect);

  CLI11_PARSE(app, argc, argv);

  if (certify->parsed())
    return wander::commands::cmd_certify(opt, std::cout);
  if (verify->parsed()) {
    if (verify->count("--horizon") == 0) opt.horizon = 4;
    return wander::commands::cmd_verify(opt, std::cout);
  }
  return wander::commands::cmd_connect_demo(opt, std::cout);
}

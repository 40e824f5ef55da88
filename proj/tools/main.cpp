#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "stplogic/cli.hpp"

namespace cli = stplogic::cli;

int main(int argc, char** argv) {
  CLI::App app{"semi-tensor product tools for logical dynamic networks"};
  app.require_subcommand(1);

  std::string model_path;
  cli::CommonOptions common;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("model", model_path, "model file (JSON)")->required();
    cmd->add_flag("--allow-substochastic", common.allow_substochastic,
                  "admit matrices whose columns do not sum to 1 (verdicts are flagged)");
    cmd->add_option("--max-dim", common.max_dim, "dimension cap for assembled matrices");
  };

  auto* validate = app.add_subcommand("validate", "check a model file and report violations");
  add_common(validate);

  auto* assemble =
      app.add_subcommand("assemble", "write the global transition matrix and lifted factors");
  add_common(assemble);
  std::string out_dir = "assembled";
  assemble->add_option("--out", out_dir, "output directory");

  auto* simulate = app.add_subcommand("simulate", "run one evolution mode and emit a CSV");
  add_common(simulate);
  cli::SimulateOptions sim;
  simulate->add_option("--mode", sim.mode, "det | independent | conditional | mc")
      ->check(CLI::IsMember(
          {"det", "deterministic", "independent", "conditional", "mc", "monte-carlo"}));
  simulate->add_option("--init", sim.init,
                       "initial condition: state, joint, factor blocks, or a file");
  simulate->add_option("--steps", sim.steps, "number of steps (rows = steps + 1)");
  simulate->add_option("--seed", sim.seed, "sampling seed (mc)");
  simulate->add_option("--samples", sim.samples, "sample paths (mc)");
  simulate->add_option("--out", sim.out_path, "output CSV path, or - for stdout");

  auto* compare = app.add_subcommand(
      "compare", "per-step L1 gap between the independence and conditional laws");
  add_common(compare);
  cli::CompareOptions cmp;
  compare->add_option("--init", cmp.init, "factor initial condition (default uniform)");
  compare->add_option("--steps", cmp.steps, "number of steps");
  compare->add_option("--threshold", cmp.threshold, "exceedance threshold for the footer");
  compare->add_option("--out", cmp.out_path, "output CSV path, or - for stdout");

  auto* check = app.add_subcommand("check", "decide whether the two laws coincide");
  add_common(check);
  cli::CheckOptions chk;
  check->add_option("--method", chk.method, "structural | exact | sampled | all")
      ->check(CLI::IsMember({"structural", "exact", "sampled", "all"}));
  check->add_option("--samples", chk.samples, "sample budget for the sampled method");
  check->add_option("--tol", chk.tol, "residual tolerance");
  check->add_option("--seed", chk.seed, "sampling seed");
  check->add_option("--point", chk.point, "joint distribution to probe and report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInvalid;
  }

  if (validate->parsed())
    return cli::cmd_validate(model_path, common, std::cout, std::cerr);
  if (assemble->parsed())
    return cli::cmd_assemble(model_path, out_dir, common, std::cout, std::cerr);
  if (simulate->parsed()) return cli::cmd_simulate(model_path, sim, common, std::cout, std::cerr);
  if (compare->parsed()) return cli::cmd_compare(model_path, cmp, common, std::cout, std::cerr);
  if (check->parsed()) return cli::cmd_check(model_path, chk, common, std::cout, std::cerr);
  return cli::kExitInvalid;
}

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "exlift/cli.hpp"

namespace {

void add_common(CLI::App* cmd, exlift::RunConfig& c) {
  cmd->add_option("--model", c.model_path, "model file")->required();
  cmd->add_option("--evidence", c.evidence_path, "evidence file");
  cmd->add_option("--query", c.query, "Atom=0|1[,Atom=0|1...]");
  cmd->add_option("--mode", c.mode)->check(CLI::IsMember({"marginal", "mpe"}));
  cmd->add_option("--engine", c.engine)->check(CLI::IsMember({"auto", "lifted", "oracle"}));
  cmd->add_option("--k-bound", c.k_bound, "constants a binary query may touch");
  cmd->add_flag("--no-memo", [&c](std::int64_t) { c.memoize = false; }, "disable statistic-level and pair tables");
  cmd->add_option("--seed", c.seed);
  cmd->add_option("--jobs", c.jobs)->check(CLI::PositiveNumber);
  cmd->add_option("--format", c.format)->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--oracle-cap", c.oracle_cap, "largest atom count the oracle enumerates");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted inference for Markov logic networks by exchangeable decomposition"};
  app.require_subcommand(1);
  exlift::RunConfig config;

  auto* infer = app.add_subcommand("infer", "answer a marginal or MPE query");
  auto* validate = app.add_subcommand("validate", "compare the lifted engine with the oracle on random queries");
  auto* bench = app.add_subcommand("bench", "time the lifted engine over domain sizes (CSV)");
  auto* describe = app.add_subcommand("describe", "fragment, decomposition and statistic space");
  for (auto* cmd : {infer, validate, bench, describe}) add_common(cmd, config);
  validate->add_option("--queries", config.queries, "battery size");
  bench->add_option("--k", config.domain_sizes, "domain sizes")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exlift::kExitFailure;
  }

  exlift::CommandOutput out;
  if (*infer)
    out = exlift::cmd_infer(config);
  else if (*validate)
    out = exlift::cmd_validate(config);
  else if (*bench)
    out = exlift::cmd_bench(config);
  else
    out = exlift::cmd_describe(config);
  std::cout << out.out;
  std::cerr << out.err;
  return out.exit_code;
}

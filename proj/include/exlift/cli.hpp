#pragma once

// Command implementations behind the exlift tool. Each returns the exit
// status and the text it would print, so tests can drive them directly.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "exlift/combinatorics.hpp"

namespace exlift {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      // usage errors, validation discrepancies
  kExitParse = 2,        // unreadable or malformed input
  kExitUnsupported = 3,  // no lifted engine applies and the oracle is over its cap
  kExitInfeasible = 4,   // evidence has probability zero
};

struct RunConfig {
  std::string model_path;
  std::string evidence_path;  // optional
  std::string query;          // "Atom=0|1[,Atom=0|1...]"
  std::string mode = "marginal";
  std::string engine = "auto";
  std::size_t k_bound = 2;
  bool memoize = true;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string format = "json";
  std::size_t oracle_cap = 25;
  std::size_t queries = 200;             // validate: battery size
  std::vector<std::size_t> domain_sizes;  // bench: k sweep
  std::function<void(BigInt&)> count_hook;
};

struct CommandOutput {
  int exit_code = kExitOk;
  std::string out;
  std::string err;
};

CommandOutput cmd_infer(const RunConfig& config);
CommandOutput cmd_validate(const RunConfig& config);
CommandOutput cmd_bench(const RunConfig& config);
CommandOutput cmd_describe(const RunConfig& config);

}  // namespace exlift

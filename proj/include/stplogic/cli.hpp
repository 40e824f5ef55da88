#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "stplogic/types.hpp"

namespace stplogic::cli {

/// Process exit codes, stable across releases.
inline constexpr int kExitOk = 0;            // success / proven consistent
inline constexpr int kExitInvalid = 1;       // parse or validation failure
inline constexpr int kExitInconsistent = 2;  // witnessed inconsistency
inline constexpr int kExitUncertified = 3;   // consistent at samples only, not proven
inline constexpr int kExitDimCap = 4;        // dimension cap exceeded

struct CommonOptions {
  bool allow_substochastic = false;  // admit column-sum violations, flagged
  std::size_t max_dim = kDefaultDimCap;
};

int cmd_validate(const std::string& model_path, const CommonOptions& common, std::ostream& out,
                 std::ostream& err);

/// Writes the assembled global matrix and the lifted factors under out_dir:
/// global.csv (+ global.delta for deterministic models) and factor_<i>.csv
/// (+ .delta).
int cmd_assemble(const std::string& model_path, const std::string& out_dir,
                 const CommonOptions& common, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::string mode = "conditional";  // det | independent | conditional | mc
  std::string init;
  std::size_t steps = 10;
  std::uint64_t seed = 0;      // mc only
  std::size_t samples = 10000;  // mc only
  std::string out_path = "-";  // "-" streams the CSV to stdout
};

int cmd_simulate(const std::string& model_path, const SimulateOptions& opt,
                 const CommonOptions& common, std::ostream& out, std::ostream& err);

struct CompareOptions {
  std::string init;  // factor form; empty means uniform factors
  std::size_t steps = 39;
  double threshold = 1e-9;
  std::string out_path = "-";
};

int cmd_compare(const std::string& model_path, const CompareOptions& opt,
                const CommonOptions& common, std::ostream& out, std::ostream& err);

struct CheckOptions {
  std::string method = "all";  // structural | exact | sampled | all
  std::size_t samples = 1000;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::string point;  // optional joint distribution to probe and report
};

int cmd_check(const std::string& model_path, const CheckOptions& opt, const CommonOptions& common,
              std::ostream& out, std::ostream& err);

}  // namespace stplogic::cli

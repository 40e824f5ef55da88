#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stplogic/network.hpp"
#include "stplogic/types.hpp"

namespace stplogic {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw rule as it appears in a model file, before network validation.
struct ModelRule {
  RuleKind kind = RuleKind::deterministic;
  std::vector<std::uint32_t> table;         // deterministic: 1-based output states
  std::vector<std::vector<double>> matrix;  // stochastic: rows
  bool lifted = false;                      // columns cover the joint state space
};

struct ModelNode {
  std::size_t id = 0;
  std::size_t k = 2;
  std::vector<std::size_t> neighbors;  // 1-based node ids
  ModelRule rule;
};

/// Parsed model document. Nodes are kept sorted by id; version "1" is the
/// only accepted format.
struct ModelFile {
  std::string version = "1";
  bool allow_substochastic = false;
  std::vector<ModelNode> nodes;
};

ModelFile parse_model(const std::string& json_text);
ModelFile load_model(const std::string& path);
std::string serialize_model(const ModelFile& m);
void save_model(const ModelFile& m, const std::string& path);

/// Every violation in the document, in node order; empty means build_network
/// accepts the same document. Substochastic columns admitted by the override
/// are reported through `notes` instead.
std::vector<std::string> validate_model(const ModelFile& m,
                                        std::vector<std::string>* notes = nullptr);

NetworkModel build_network(const ModelFile& m);

/// Shortest decimal form that parses back to the identical double
/// (17 significant digits when needed).
std::string format_real(double v);

/// Unit-column index form, e.g. "delta 4 [1,3,2,4]".
std::string delta_form(const LogicalMatrix& m);
LogicalMatrix parse_delta_form(const std::string& line);

/// Bare numeric rows, comma separated, LF endings, round-trip precision.
void write_matrix_csv(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix_csv(std::istream& in);

/// Trajectory and divergence files: one header row, numeric rows, then
/// "# key=value" footer comment lines.
struct TrajectoryFile {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> footer;
};

void write_trajectory_csv(std::ostream& out, const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows,
                          const std::vector<std::pair<std::string, std::string>>& footer);
TrajectoryFile read_trajectory_csv(std::istream& in);

/// Distribution rows t = 0..T with header "t,s1,...,sk".
void write_distribution_csv(std::ostream& out, const std::vector<ProbabilityVector>& joints,
                            const std::vector<std::pair<std::string, std::string>>& footer);

/// Decoded state rows t = 0..T with header "t,x1,...,xn".
void write_state_csv(std::ostream& out, const std::vector<std::size_t>& states,
                     const std::vector<std::size_t>& alphabets,
                     const std::vector<std::pair<std::string, std::string>>& footer);

/// Initial condition in one of three shapes, inline or loaded from a file:
/// "3" (state), "0.2,0.2,0.3,0.3" (joint), "0.4,0.6;0.5,0.5" (factors).
/// A trajectory CSV resumes from its last row.
struct InitialCondition {
  enum class Kind { state, joint, factors };
  Kind kind = Kind::joint;
  std::size_t state = 0;  // 1-based
  std::vector<double> joint;
  std::vector<std::vector<double>> factors;
};

InitialCondition parse_initial(const std::string& arg);

}  // namespace stplogic

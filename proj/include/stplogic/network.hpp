#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "stplogic/stp.hpp"
#include "stplogic/types.hpp"

namespace stplogic {

enum class RuleKind { deterministic, stochastic };

/// Local update rule in structure-matrix form: k_i rows, one column per
/// neighbor state combination.
struct DeterministicRule {
  LogicalMatrix structure;
};

/// Local transition matrix: k_i rows; columns cover the neighbor states, or
/// all k global states when `lifted` is set.
struct StochasticRule {
  StochasticMatrix matrix;
  bool lifted = false;
};

struct Node {
  std::size_t k = 2;
  std::vector<std::size_t> neighbors;  // ascending 1-based node ids
  std::variant<DeterministicRule, StochasticRule> rule;
};

/// Node whose rule is a truth table: table[j] is the output value for the
/// j-th neighbor state combination in mixed-radix order.
Node table_node(std::size_t k, std::vector<std::size_t> neighbors,
                std::vector<std::uint32_t> table);

/// The matrix is admitted leniently here; NetworkModel enforces stochasticity
/// (or records the violation under the substochastic override).
Node stochastic_node(std::size_t k, std::vector<std::size_t> neighbors, DenseMatrix matrix,
                     bool lifted = false, double eps = kStochasticEps);

/// A network of logical nodes, wholly deterministic or wholly stochastic.
/// Validates alphabet sizes, neighbor lists, rule shapes, and stochasticity
/// (unless substochastic rules are explicitly admitted) on construction.
class NetworkModel {
 public:
  explicit NetworkModel(std::vector<Node> nodes, bool allow_substochastic = false);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t pos) const { return nodes_[pos]; }  // 0-based position
  const std::vector<Node>& nodes() const { return nodes_; }
  RuleKind kind() const { return kind_; }
  const std::vector<std::size_t>& alphabets() const { return alphabets_; }

  /// Product of the alphabet sizes, guarded by the dimension cap.
  std::size_t global_dim(std::size_t dim_cap = kDefaultDimCap) const;

  bool allow_substochastic() const { return allow_substochastic_; }
  /// 1-based ids of nodes whose matrix failed column-stochastic validation.
  const std::vector<std::size_t>& substochastic_nodes() const { return substochastic_nodes_; }

 private:
  std::vector<Node> nodes_;
  std::vector<std::size_t> alphabets_;
  RuleKind kind_ = RuleKind::deterministic;
  bool allow_substochastic_ = false;
  std::vector<std::size_t> substochastic_nodes_;
};

/// Mixed-radix state index, node 1 most significant: 1-based values map to a
/// 1-based index in [1, prod k_i].
std::size_t state_encode(const std::vector<std::size_t>& values,
                         const std::vector<std::size_t>& alphabets);

std::vector<std::size_t> state_decode(std::size_t index, const std::vector<std::size_t>& alphabets);

/// Rule lift to global-argument form: rule composed with the projection onto
/// its neighbor set, giving a matrix over all k global states.
LogicalMatrix lift_local(const LogicalMatrix& rule, const std::vector<std::size_t>& neighbors,
                         const std::vector<std::size_t>& alphabets,
                         std::size_t dim_cap = kDefaultDimCap);

DenseMatrix lift_local(const DenseMatrix& rule, const std::vector<std::size_t>& neighbors,
                       const std::vector<std::size_t>& alphabets,
                       std::size_t dim_cap = kDefaultDimCap);

/// Left fold of the Khatri-Rao product over the lifted factors.
LogicalMatrix khatri_rao_fold_logical(const std::vector<LogicalMatrix>& ms,
                                      std::size_t dim_cap = kDefaultDimCap);

DenseMatrix khatri_rao_fold(const std::vector<DenseMatrix>& ms,
                            std::size_t dim_cap = kDefaultDimCap);

/// Global one-step representation: the full transition matrix over the k
/// product states together with the per-node lifted factors.
struct GlobalSystem {
  RuleKind kind = RuleKind::deterministic;
  std::vector<std::size_t> alphabets;
  std::size_t k = 0;

  std::vector<LogicalMatrix> lifted_logical;  // deterministic factors, k_i x k
  std::optional<LogicalMatrix> m;             // k x k

  std::vector<DenseMatrix> lifted_dense;  // stochastic factors, k_i x k
  std::optional<StochasticMatrix> q;      // k x k

  bool inputs_stochastic = true;  // false when admitted under the override
};

GlobalSystem assemble_global(const NetworkModel& model, std::size_t dim_cap = kDefaultDimCap);

/// Recovers the lifted factor of one node from the assembled global matrix by
/// projection; inverse of assembly for stochastic and deterministic systems.
DenseMatrix extract_subsystem(const GlobalSystem& g, std::size_t node_1based);

LogicalMatrix extract_subsystem_logical(const GlobalSystem& g, std::size_t node_1based);

}  // namespace stplogic

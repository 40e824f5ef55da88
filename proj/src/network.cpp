#include "stplogic/network.hpp"

#include <algorithm>
#include <string>

namespace stplogic {

namespace {

std::size_t product_of(const std::vector<std::size_t>& alphabets,
                       const std::vector<std::size_t>& subset) {
  std::size_t p = 1;
  for (std::size_t id : subset) p = detail::checked_mul(p, alphabets[id - 1]);
  return p;
}

}  // namespace

Node table_node(std::size_t k, std::vector<std::size_t> neighbors,
                std::vector<std::uint32_t> table) {
  return Node{k, std::move(neighbors), DeterministicRule{LogicalMatrix(k, std::move(table))}};
}

Node stochastic_node(std::size_t k, std::vector<std::size_t> neighbors, DenseMatrix matrix,
                     bool lifted, double eps) {
  return Node{k, std::move(neighbors),
              StochasticRule{StochasticMatrix(std::move(matrix), eps, /*strict=*/false), lifted}};
}

NetworkModel::NetworkModel(std::vector<Node> nodes, bool allow_substochastic)
    : nodes_(std::move(nodes)), allow_substochastic_(allow_substochastic) {
  if (nodes_.empty()) throw ValidationError("model has no nodes");

  alphabets_.reserve(nodes_.size());
  for (const Node& n : nodes_) {
    if (n.k == 0) throw ValidationError("alphabet size must be at least 1");
    alphabets_.push_back(n.k);
  }
  std::size_t k = 1;
  for (std::size_t ki : alphabets_) k = detail::checked_mul(k, ki);

  kind_ = std::holds_alternative<DeterministicRule>(nodes_.front().rule)
              ? RuleKind::deterministic
              : RuleKind::stochastic;

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const std::string id = "node " + std::to_string(i + 1);

    for (std::size_t u = 0; u < n.neighbors.size(); ++u) {
      if (n.neighbors[u] < 1 || n.neighbors[u] > nodes_.size())
        throw ValidationError(id + " neighbor " + std::to_string(n.neighbors[u]) +
                              " is out of range");
      if (u > 0 && n.neighbors[u] <= n.neighbors[u - 1])
        throw ValidationError(id + " neighbors must be strictly ascending");
    }
    const std::size_t arity = product_of(alphabets_, n.neighbors);

    if (const auto* det = std::get_if<DeterministicRule>(&n.rule)) {
      if (kind_ != RuleKind::deterministic)
        throw ValidationError(id + " mixes deterministic and stochastic rules");
      if (det->structure.rows() != n.k)
        throw ValidationError(id + " rule has " + std::to_string(det->structure.rows()) +
                              " rows, expected " + std::to_string(n.k));
      if (det->structure.cols() != arity)
        throw ValidationError(id + " rule has " + std::to_string(det->structure.cols()) +
                              " columns, expected " + std::to_string(arity));
    } else {
      const auto& st = std::get<StochasticRule>(n.rule);
      if (kind_ != RuleKind::stochastic)
        throw ValidationError(id + " mixes deterministic and stochastic rules");
      if (st.matrix.rows() != n.k)
        throw ValidationError(id + " rule has " + std::to_string(st.matrix.rows()) +
                              " rows, expected " + std::to_string(n.k));
      const std::size_t want = st.lifted ? k : arity;
      if (st.matrix.cols() != want)
        throw ValidationError(id + " rule has " + std::to_string(st.matrix.cols()) +
                              " columns, expected " + std::to_string(want));
      if (!st.matrix.is_valid()) {
        if (!allow_substochastic_)
          throw ValidationError(id + " " + st.matrix.verdict().message);
        substochastic_nodes_.push_back(i + 1);
      }
    }
  }
}

std::size_t NetworkModel::global_dim(std::size_t dim_cap) const {
  std::size_t k = 1;
  for (std::size_t ki : alphabets_) k = detail::checked_mul(k, ki);
  if (k > dim_cap) throw DimensionCapError(k, dim_cap);
  return k;
}

std::size_t state_encode(const std::vector<std::size_t>& values,
                         const std::vector<std::size_t>& alphabets) {
  if (values.size() != alphabets.size())
    throw ShapeError("state has " + std::to_string(values.size()) + " components, expected " +
                     std::to_string(alphabets.size()));
  std::size_t index = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 1 || values[i] > alphabets[i])
      throw ValidationError("component " + std::to_string(i + 1) + " value " +
                            std::to_string(values[i]) + " outside [1, " +
                            std::to_string(alphabets[i]) + "]");
    index = index * alphabets[i] + (values[i] - 1);
  }
  return index + 1;
}

std::vector<std::size_t> state_decode(std::size_t index,
                                      const std::vector<std::size_t>& alphabets) {
  std::size_t k = 1;
  for (std::size_t ki : alphabets) k = detail::checked_mul(k, ki);
  if (index < 1 || index > k)
    throw ValidationError("state index " + std::to_string(index) + " outside [1, " +
                          std::to_string(k) + "]");
  std::vector<std::size_t> values(alphabets.size());
  std::size_t rem = index - 1;
  for (std::size_t i = alphabets.size(); i-- > 0;) {
    values[i] = rem % alphabets[i] + 1;
    rem /= alphabets[i];
  }
  return values;
}

LogicalMatrix lift_local(const LogicalMatrix& rule, const std::vector<std::size_t>& neighbors,
                         const std::vector<std::size_t>& alphabets, std::size_t dim_cap) {
  const auto phi = projection_matrix(alphabets, neighbors, dim_cap);
  if (rule.cols() != phi.rows())
    throw ShapeError("rule has " + std::to_string(rule.cols()) + " columns, neighbor states are " +
                     std::to_string(phi.rows()));
  return multiply_logical(rule, phi);
}

DenseMatrix lift_local(const DenseMatrix& rule, const std::vector<std::size_t>& neighbors,
                       const std::vector<std::size_t>& alphabets, std::size_t dim_cap) {
  const auto phi = projection_matrix(alphabets, neighbors, dim_cap);
  if (rule.cols() != phi.rows())
    throw ShapeError("rule has " + std::to_string(rule.cols()) + " columns, neighbor states are " +
                     std::to_string(phi.rows()));
  return dense_times_logical(rule, phi);
}

LogicalMatrix khatri_rao_fold_logical(const std::vector<LogicalMatrix>& ms, std::size_t dim_cap) {
  if (ms.empty()) throw ShapeError("nothing to fold");
  LogicalMatrix acc = ms.front();
  for (std::size_t i = 1; i < ms.size(); ++i) acc = khatri_rao_logical(acc, ms[i], dim_cap);
  return acc;
}

DenseMatrix khatri_rao_fold(const std::vector<DenseMatrix>& ms, std::size_t dim_cap) {
  if (ms.empty()) throw ShapeError("nothing to fold");
  DenseMatrix acc = ms.front();
  for (std::size_t i = 1; i < ms.size(); ++i) acc = khatri_rao(acc, ms[i], dim_cap);
  return acc;
}

GlobalSystem assemble_global(const NetworkModel& model, std::size_t dim_cap) {
  GlobalSystem g;
  g.kind = model.kind();
  g.alphabets = model.alphabets();
  g.k = model.global_dim(dim_cap);
  g.inputs_stochastic = model.substochastic_nodes().empty();

  if (g.kind == RuleKind::deterministic) {
    g.lifted_logical.reserve(model.size());
    for (const Node& n : model.nodes())
      g.lifted_logical.push_back(
          lift_local(std::get<DeterministicRule>(n.rule).structure, n.neighbors, g.alphabets,
                     dim_cap));
    g.m = khatri_rao_fold_logical(g.lifted_logical, dim_cap);
  } else {
    g.lifted_dense.reserve(model.size());
    for (const Node& n : model.nodes()) {
      const auto& st = std::get<StochasticRule>(n.rule);
      g.lifted_dense.push_back(st.lifted
                                   ? st.matrix.dense()
                                   : lift_local(st.matrix.dense(), n.neighbors, g.alphabets,
                                                dim_cap));
    }
    g.q = StochasticMatrix(khatri_rao_fold(g.lifted_dense, dim_cap), kStochasticEps,
                           /*strict=*/false);
  }
  return g;
}

DenseMatrix extract_subsystem(const GlobalSystem& g, std::size_t node_1based) {
  if (node_1based < 1 || node_1based > g.alphabets.size())
    throw ValidationError("node " + std::to_string(node_1based) + " out of range");
  if (!g.q) throw ShapeError("system has no stochastic global matrix");
  const auto phi = projection_matrix(g.alphabets, {node_1based});
  return logical_times_dense(phi, g.q->dense());
}

LogicalMatrix extract_subsystem_logical(const GlobalSystem& g, std::size_t node_1based) {
  if (node_1based < 1 || node_1based > g.alphabets.size())
    throw ValidationError("node " + std::to_string(node_1based) + " out of range");
  if (!g.m) throw ShapeError("system has no deterministic global matrix");
  const auto phi = projection_matrix(g.alphabets, {node_1based});
  return multiply_logical(phi, *g.m);
}

}  // namespace stplogic

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "stplogic/network.hpp"
#include "stplogic/stp.hpp"
#include "stplogic/types.hpp"

using namespace stplogic;

namespace {

const DenseMatrix kQ1 = DenseMatrix::from_rows({{0.3, 0.5, 1.0, 0.2}, {0.7, 0.5, 0.0, 0.8}});
const DenseMatrix kQ2 = DenseMatrix::from_rows({{0.4, 0.2, 0.5, 0.7}, {0.6, 0.8, 0.5, 0.3}});
const DenseMatrix kQ = DenseMatrix::from_rows({{0.12, 0.1, 0.5, 0.14},
                                               {0.18, 0.4, 0.5, 0.06},
                                               {0.28, 0.1, 0.0, 0.56},
                                               {0.42, 0.4, 0.0, 0.24}});

NetworkModel two_node_lifted() {
  return NetworkModel({stochastic_node(2, {1, 2}, kQ1, /*lifted=*/true),
                       stochastic_node(2, {1, 2}, kQ2, /*lifted=*/true)});
}

struct Gen {
  std::mt19937 rng;
  explicit Gen(std::uint32_t seed) : rng(seed) {}

  std::size_t pick(std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); }

  std::vector<std::size_t> neighbor_set(std::size_t n) {
    std::vector<std::size_t> ns;
    for (std::size_t j = 1; j <= n; ++j)
      if (rng() % 2 == 0) ns.push_back(j);
    return ns;  // possibly empty: constant node
  }

  DenseMatrix stochastic(std::size_t r, std::size_t c) {
    DenseMatrix m(r, c);
    for (std::size_t j = 0; j < c; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < r; ++i) {
        m(i, j) = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        s += m(i, j);
      }
      for (std::size_t i = 0; i < r; ++i) m(i, j) /= s;
    }
    return m;
  }

  NetworkModel random_stochastic_model(std::size_t max_n, std::size_t max_k) {
    const std::size_t n = pick(1, max_n);
    std::vector<std::size_t> alphabets(n);
    for (auto& k : alphabets) k = pick(1, max_k);
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ns = neighbor_set(n);
      std::size_t arity = 1;
      for (std::size_t j : ns) arity *= alphabets[j - 1];
      nodes.push_back(stochastic_node(alphabets[i], ns, stochastic(alphabets[i], arity)));
    }
    return NetworkModel(std::move(nodes));
  }

  NetworkModel random_deterministic_model(std::size_t max_n, std::size_t max_k) {
    const std::size_t n = pick(1, max_n);
    std::vector<std::size_t> alphabets(n);
    for (auto& k : alphabets) k = pick(1, max_k);
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ns = neighbor_set(n);
      std::size_t arity = 1;
      for (std::size_t j : ns) arity *= alphabets[j - 1];
      std::vector<std::uint32_t> table(arity);
      for (auto& v : table) v = static_cast<std::uint32_t>(pick(1, alphabets[i]));
      nodes.push_back(table_node(alphabets[i], ns, std::move(table)));
    }
    return NetworkModel(std::move(nodes));
  }
};

// Evaluates one node's truth table on a global state, by decoding neighbors.
std::size_t eval_table(const NetworkModel& model, std::size_t node_pos,
                       const std::vector<std::size_t>& values) {
  const Node& n = model.node(node_pos);
  std::vector<std::size_t> nvals, nalpha;
  for (std::size_t j : n.neighbors) {
    nvals.push_back(values[j - 1]);
    nalpha.push_back(model.alphabets()[j - 1]);
  }
  const std::size_t local = state_encode(nvals, nalpha);
  return std::get<DeterministicRule>(n.rule).structure.col_index(local - 1);
}

}  // namespace

TEST_CASE("state encoding is mixed-radix with node 1 most significant") {
  CHECK(state_encode({1, 1}, {2, 2}) == 1);
  CHECK(state_encode({2, 1}, {2, 2}) == 3);
  CHECK(state_decode(3, {2, 2}) == std::vector<std::size_t>{2, 1});
  CHECK(state_decode(1, {3, 2, 4}) == std::vector<std::size_t>{1, 1, 1});

  for (const auto& alphabets :
       {std::vector<std::size_t>{2, 3, 2}, std::vector<std::size_t>{3, 2, 2}}) {
    std::size_t k = 1;
    for (std::size_t ki : alphabets) k *= ki;
    for (std::size_t idx = 1; idx <= k; ++idx)
      CHECK(state_encode(state_decode(idx, alphabets), alphabets) == idx);
  }

  // Encoding agrees with the Kronecker position of the unit-vector product.
  const std::vector<std::size_t> alphabets = {2, 3, 2};
  for (std::size_t x1 = 1; x1 <= 2; ++x1)
    for (std::size_t x2 = 1; x2 <= 3; ++x2)
      for (std::size_t x3 = 1; x3 <= 2; ++x3) {
        const LogicalMatrix u1(2, {static_cast<std::uint32_t>(x1)});
        const LogicalMatrix u2(3, {static_cast<std::uint32_t>(x2)});
        const LogicalMatrix u3(2, {static_cast<std::uint32_t>(x3)});
        const auto prod = kron_logical(kron_logical(u1, u2), u3);
        CHECK(prod.col_index(0) == state_encode({x1, x2, x3}, alphabets));
      }

  CHECK_THROWS_AS(state_encode({1, 3}, {2, 2}), ValidationError);
  CHECK_THROWS_AS(state_encode({1}, {2, 2}), ShapeError);
  CHECK_THROWS_AS(state_decode(5, {2, 2}), ValidationError);
  CHECK_THROWS_AS(state_decode(0, {2, 2}), ValidationError);
}

TEST_CASE("lift composes a rule with the projection onto its neighbors") {
  // Full neighbor set: projection is the identity, rule passes through.
  const LogicalMatrix xor_rule(2, {2, 1, 1, 2});
  CHECK(lift_local(xor_rule, {1, 2}, {2, 2}) == xor_rule);

  // Empty neighbor set: one column replicated across all global states.
  const auto constant = lift_local(DenseMatrix(2, 1, {0.3, 0.7}), {}, {2, 2});
  REQUIRE(constant.cols() == 4);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(constant(0, j) == 0.3);
    CHECK(constant(1, j) == 0.7);
  }

  // Conjunction of the first two of three nodes, enumerated over all 8 states.
  const LogicalMatrix and_rule(2, {1, 2, 2, 2});
  const auto lifted = lift_local(and_rule, {1, 2}, {2, 2, 2});
  CHECK(lifted.col_indices() == std::vector<std::uint32_t>{1, 1, 2, 2, 2, 2, 2, 2});

  CHECK_THROWS_AS(lift_local(and_rule, {1}, {2, 2, 2}), ShapeError);
}

TEST_CASE("projection of an encoded state is the encoded neighbor restriction") {
  const std::vector<std::size_t> alphabets = {2, 3, 2};
  const std::vector<std::vector<std::size_t>> subsets = {{1}, {3}, {1, 2}, {2, 3}, {1, 3}};
  for (const auto& u : subsets) {
    const auto phi = projection_matrix(alphabets, u);
    std::vector<std::size_t> ualpha;
    for (std::size_t j : u) ualpha.push_back(alphabets[j - 1]);
    for (std::size_t idx = 1; idx <= 12; ++idx) {
      const auto values = state_decode(idx, alphabets);
      std::vector<std::size_t> uvals;
      for (std::size_t j : u) uvals.push_back(values[j - 1]);
      CHECK(phi.col_index(idx - 1) == state_encode(uvals, ualpha));
    }
  }
}

TEST_CASE("model validation rejects malformed networks") {
  CHECK_THROWS_AS(NetworkModel({}), ValidationError);

  // Mixed rule kinds.
  CHECK_THROWS_AS(NetworkModel({table_node(2, {1}, {1, 2}),
                                stochastic_node(2, {2}, DenseMatrix::identity(2))}),
                  ValidationError);

  // Arity mismatch: two binary neighbors need four columns.
  CHECK_THROWS_AS(NetworkModel({table_node(2, {1}, {1, 2, 1, 2}), table_node(2, {2}, {1, 2})}),
                  ValidationError);

  // Neighbor ids out of range or unsorted.
  CHECK_THROWS_AS(NetworkModel({table_node(2, {3}, {1, 2})}), ValidationError);
  CHECK_THROWS_AS(NetworkModel({table_node(2, {2, 1}, {1, 2, 1, 2}), table_node(2, {2}, {1, 2})}),
                  ValidationError);

  // Substochastic column rejected without the override, admitted with it.
  const auto bad = DenseMatrix::from_rows({{0.3, 0.4, 0.4, 0.3}, {0.7, 0.6, 0.6, 0.3}});
  const std::vector<Node> nodes = {stochastic_node(2, {1, 2}, bad, true),
                                   stochastic_node(2, {1, 2}, kQ2, true)};
  try {
    NetworkModel reject(nodes);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("node 1 column 4 sums to 0.6") != std::string::npos);
  }
  const NetworkModel admitted(nodes, /*allow_substochastic=*/true);
  CHECK(admitted.substochastic_nodes() == std::vector<std::size_t>{1});
}

TEST_CASE("assembly folds lifted factors into the global matrix") {
  const auto g = assemble_global(two_node_lifted());
  REQUIRE(g.kind == RuleKind::stochastic);
  REQUIRE(g.k == 4);
  CHECK(g.q->dense().max_abs_diff(kQ) < 1e-12);
  CHECK(g.inputs_stochastic);
  CHECK(g.q->is_valid());

  // Single node: the global matrix is the rule itself.
  const auto three = DenseMatrix::from_rows({{0.2, 0.3, 0.5}, {0.3, 0.3, 0.2}, {0.5, 0.4, 0.3}});
  const auto solo = assemble_global(NetworkModel({stochastic_node(3, {1}, three)}));
  CHECK(solo.q->dense()(2, 0) == 0.5);
  CHECK(extract_subsystem(solo, 1).max_abs_diff(solo.q->dense()) == 0.0);

  // Two self-copying Boolean nodes give the identity global map.
  const auto ident =
      assemble_global(NetworkModel({table_node(2, {1}, {1, 2}), table_node(2, {2}, {1, 2})}));
  CHECK(*ident.m == LogicalMatrix::identity(4));
  CHECK(extract_subsystem_logical(ident, 2) == LogicalMatrix(2, {1, 2, 1, 2}));
}

TEST_CASE("extraction recovers the lifted factors of the two-node chain") {
  const auto g = assemble_global(two_node_lifted());
  CHECK(extract_subsystem(g, 1).max_abs_diff(kQ1) < 1e-12);
  CHECK(extract_subsystem(g, 2).max_abs_diff(kQ2) < 1e-12);
  CHECK_THROWS_AS(extract_subsystem(g, 3), ValidationError);
  CHECK_THROWS_AS(extract_subsystem_logical(g, 1), ShapeError);
}

TEST_CASE("stochastic assembly and extraction round-trip on random models") {
  Gen g(4242);
  for (int it = 0; it < 40; ++it) {
    const auto model = g.random_stochastic_model(4, 3);
    const auto sys = assemble_global(model);
    REQUIRE(sys.q.has_value());
    CHECK(sys.q->is_valid());
    CHECK(validate_stochastic(sys.q->dense(), 1e-12).ok);
    for (std::size_t i = 1; i <= model.size(); ++i)
      CHECK(extract_subsystem(sys, i).max_abs_diff(sys.lifted_dense[i - 1]) < 1e-12);
  }
}

TEST_CASE("deterministic assembly and extraction round-trip exactly") {
  Gen g(2424);
  for (int it = 0; it < 40; ++it) {
    const auto model = g.random_deterministic_model(4, 3);
    const auto sys = assemble_global(model);
    REQUIRE(sys.m.has_value());
    for (std::size_t i = 1; i <= model.size(); ++i)
      CHECK(extract_subsystem_logical(sys, i) == sys.lifted_logical[i - 1]);
  }
}

TEST_CASE("global map equals per-node table evaluation on every state") {
  Gen g(777);
  for (int it = 0; it < 30; ++it) {
    const auto model = g.random_deterministic_model(4, 3);
    const auto sys = assemble_global(model);
    for (std::size_t idx = 1; idx <= sys.k; ++idx) {
      const auto values = state_decode(idx, model.alphabets());
      std::vector<std::size_t> next(model.size());
      for (std::size_t i = 0; i < model.size(); ++i) next[i] = eval_table(model, i, values);
      CHECK(sys.m->col_index(idx - 1) == state_encode(next, model.alphabets()));
    }
  }
}

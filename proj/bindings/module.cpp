#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "stplogic/consistency.hpp"
#include "stplogic/evolution.hpp"
#include "stplogic/model_io.hpp"
#include "stplogic/network.hpp"
#include "stplogic/stp.hpp"
#include "stplogic/types.hpp"

namespace py = pybind11;
using namespace stplogic;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  DenseMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
  return m;
}

std::vector<DenseMatrix> to_matrices(const std::vector<Array>& arrays) {
  std::vector<DenseMatrix> out;
  out.reserve(arrays.size());
  for (const auto& a : arrays) out.push_back(to_matrix(a));
  return out;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  const auto r = a.unchecked<1>();
  std::vector<double> v(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) v[static_cast<std::size_t>(i)] = r(i);
  return v;
}

py::array_t<double> from_matrix(const DenseMatrix& m) {
  py::array_t<double> a({m.rows(), m.cols()});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
  return a;
}

py::array_t<double> from_vector(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  auto w = a.mutable_unchecked<1>();
  for (std::size_t i = 0; i < v.size(); ++i) w(static_cast<py::ssize_t>(i)) = v[i];
  return a;
}

py::array_t<double> from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows[0].size();
  py::array_t<double> a({r, c});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = rows[i][j];
  return a;
}

FactorState to_factor_state(const std::vector<Array>& factors) {
  std::vector<ProbabilityVector> pv;
  pv.reserve(factors.size());
  for (const auto& f : factors) pv.emplace_back(to_vector(f));
  return FactorState(std::move(pv));
}

const char* status_name(ConsistencyStatus s) {
  switch (s) {
    case ConsistencyStatus::consistent: return "consistent";
    case ConsistencyStatus::inconsistent: return "inconsistent";
    case ConsistencyStatus::consistent_at_samples: return "consistent_at_samples";
  }
  return "unknown";
}

const char* method_name(CheckMethod m) {
  switch (m) {
    case CheckMethod::sampled: return "sampled";
    case CheckMethod::exact: return "exact";
    case CheckMethod::structural: return "structural";
    case CheckMethod::matrix_condition: return "matrix_condition";
  }
  return "unknown";
}

py::dict verdict_dict(const ConsistencyVerdict& v) {
  py::dict d;
  d["status"] = status_name(v.status);
  d["method"] = method_name(v.method);
  d["residual"] = v.residual;
  d["samples_used"] = v.samples_used;
  d["tolerance"] = v.tolerance;
  d["witness"] = v.witness ? py::object(from_vector(v.witness->values())) : py::none();
  d["note"] = v.note;
  return d;
}

py::dict check_dispatch(const std::vector<Array>& factors, const std::string& method,
                        std::size_t samples, double tol, std::uint64_t seed,
                        bool allow_substochastic) {
  const HOperator h(to_matrices(factors), allow_substochastic);
  if (method == "sampled") return verdict_dict(check_consistency_sampled(h, samples, tol, seed));
  if (method == "exact") return verdict_dict(check_consistency_exact(h, tol));
  if (method == "structural") {
    const auto s = check_structural_sufficient(h.lifted());
    py::dict d;
    d["status"] = s.satisfied ? "consistent" : "unknown";
    d["method"] = "structural";
    d["constant_column_ids"] = s.constant_column_ids;
    return d;
  }
  if (method == "all") {
    const auto s = check_structural_sufficient(h.lifted());
    if (s.satisfied) {
      py::dict d;
      d["status"] = "consistent";
      d["method"] = "structural";
      d["constant_column_ids"] = s.constant_column_ids;
      return d;
    }
    try {
      return verdict_dict(check_consistency_exact(h, tol));
    } catch (const DimensionCapError&) {
      return verdict_dict(check_consistency_sampled(h, samples, tol, seed));
    }
  }
  throw py::value_error("method must be one of: structural, exact, sampled, all");
}

py::dict model_dict(const std::string& path) {
  const ModelFile file = load_model(path);
  const NetworkModel model = build_network(file);
  const GlobalSystem g = assemble_global(model);
  py::dict d;
  d["kind"] = g.kind == RuleKind::deterministic ? "deterministic" : "stochastic";
  d["alphabets"] = g.alphabets;
  d["k"] = g.k;
  py::list factors;
  if (g.kind == RuleKind::deterministic) {
    for (const auto& f : g.lifted_logical) factors.append(from_matrix(f.dense()));
    d["global"] = from_matrix(g.m->dense());
    std::vector<std::size_t> delta(g.m->col_indices().begin(), g.m->col_indices().end());
    d["delta"] = delta;
  } else {
    for (const auto& f : g.lifted_dense) factors.append(from_matrix(f));
    d["global"] = from_matrix(g.q->dense());
  }
  d["factors"] = factors;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "semi-tensor product algebra and logical dynamic network models";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DimensionCapError>(m, "DimensionCapError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def(
      "stp", [](const Array& a, const Array& b) { return from_matrix(stp(to_matrix(a), to_matrix(b))); },
      py::arg("a"), py::arg("b"),
      "Semi-tensor product; degenerates to the matrix product when the inner dimensions match.");
  m.def(
      "kron", [](const Array& a, const Array& b) { return from_matrix(kron(to_matrix(a), to_matrix(b))); },
      py::arg("a"), py::arg("b"));
  m.def(
      "khatri_rao",
      [](const Array& a, const Array& b) { return from_matrix(khatri_rao(to_matrix(a), to_matrix(b))); },
      py::arg("a"), py::arg("b"), "Column-wise Kronecker product.");
  m.def(
      "khatri_rao_fold",
      [](const std::vector<Array>& ms) { return from_matrix(khatri_rao_fold(to_matrices(ms))); },
      py::arg("matrices"), "Left fold of the Khatri-Rao product; assembles a global matrix.");
  m.def(
      "swap_matrix",
      [](std::size_t m_, std::size_t n_) { return from_matrix(swap_matrix(m_, n_).dense()); },
      py::arg("m"), py::arg("n"));
  m.def(
      "power_reduce", [](std::size_t k) { return from_matrix(power_reduce_matrix(k).dense()); },
      py::arg("k"), "Matrix sending a point mass to its self-Kronecker square.");

  m.def(
      "simulate_conditional",
      [](const Array& q, const Array& p0, std::size_t steps) {
        SimulationOptions opt;
        opt.t_max = steps;
        opt.stop_on_stationary = false;
        const auto traj =
            simulate_conditional(StochasticMatrix(to_matrix(q)), ProbabilityVector(to_vector(p0)), opt);
        std::vector<std::vector<double>> rows;
        rows.reserve(traj.joints.size());
        for (const auto& p : traj.joints) rows.push_back(p.values());
        return from_rows(rows);
      },
      py::arg("q"), py::arg("p0"), py::arg("steps") = 10,
      "Linear law p(t+1) = Q p(t); returns the (steps+1) x k array of joints.");

  m.def(
      "simulate_independent",
      [](const std::vector<Array>& factors, const std::vector<Array>& p0, std::size_t steps) {
        SimulationOptions opt;
        opt.t_max = steps;
        opt.stop_on_stationary = false;
        const auto traj = simulate_independent(to_matrices(factors), to_factor_state(p0), opt);
        std::vector<std::vector<double>> rows;
        rows.reserve(traj.joints.size());
        for (const auto& p : traj.joints) rows.push_back(p.values());
        return from_rows(rows);
      },
      py::arg("factors"), py::arg("p0"), py::arg("steps") = 10,
      "Independence-model law on factor marginals; returns the joints as products.");

  m.def(
      "simulate_deterministic",
      [](const std::vector<std::uint32_t>& delta, std::size_t x0, std::size_t steps) {
        const LogicalMatrix m_(delta.size(), delta);
        return simulate_deterministic(m_, x0, steps).states;
      },
      py::arg("delta"), py::arg("x0"), py::arg("steps") = 1000,
      "Iterates a delta-form transition map from a 1-based state; stops at the first revisit.");

  m.def(
      "compare",
      [](const std::vector<Array>& factors, const std::vector<Array>& p0, std::size_t steps,
         double threshold) {
        const auto rep = compare_models(to_matrices(factors), to_factor_state(p0), steps, threshold);
        py::dict d;
        d["l1"] = from_vector(rep.l1);
        d["max"] = rep.max;
        d["argmax"] = rep.argmax;
        d["first_exceedance"] =
            rep.first_exceedance ? py::object(py::int_(*rep.first_exceedance)) : py::none();
        d["threshold"] = rep.threshold;
        return d;
      },
      py::arg("factors"), py::arg("p0"), py::arg("steps") = 39, py::arg("threshold") = 1e-9,
      "L1 distance per step between the independence and conditional laws.");

  m.def("check_consistency", &check_dispatch, py::arg("factors"), py::arg("method") = "all",
        py::arg("samples") = 1000, py::arg("tol") = kConsistencyTol, py::arg("seed") = 0,
        py::arg("allow_substochastic") = false,
        "Decides whether the two stochastic laws coincide on the whole simplex.");

  m.def(
      "point_consistency",
      [](const std::vector<Array>& factors, const Array& p, bool allow_substochastic) {
        const HOperator h(to_matrices(factors), allow_substochastic);
        return point_consistency(h, ProbabilityVector(to_vector(p)));
      },
      py::arg("factors"), py::arg("p"), py::arg("allow_substochastic") = false,
      "Sup-norm gap between the two one-step laws at a single distribution.");

  m.def(
      "monte_carlo",
      [](const std::vector<Array>& factors, const Array& p0, std::size_t steps,
         std::size_t samples, std::uint64_t seed) {
        return from_rows(
            monte_carlo_oracle(to_matrices(factors), ProbabilityVector(to_vector(p0)), steps,
                               samples, seed));
      },
      py::arg("factors"), py::arg("p0"), py::arg("steps") = 1, py::arg("samples") = 10000,
      py::arg("seed") = 0, "Empirical per-step distributions from sampled state updates.");

  m.def("load_model", &model_dict, py::arg("path"),
        "Loads a model file and assembles its global representation.");
}

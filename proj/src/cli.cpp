#include "stplogic/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "stplogic/consistency.hpp"
#include "stplogic/evolution.hpp"
#include "stplogic/model_io.hpp"
#include "stplogic/network.hpp"

namespace stplogic::cli {

namespace {

namespace fs = std::filesystem;

int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DimensionCapError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDimCap;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

ModelFile load_with_flags(const std::string& path, const CommonOptions& common) {
  ModelFile m = load_model(path);
  if (common.allow_substochastic) m.allow_substochastic = true;
  return m;
}

std::string fmt_residual(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Probability vectors in reports use four decimals, matching the tables the
// trajectories are checked against.
std::string fmt_vec4(const std::vector<double>& v) {
  std::string s = "[";
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    std::snprintf(buf, sizeof(buf), "%.4f", v[i]);
    s += buf;
  }
  return s + "]";
}

const char* kind_name(RuleKind k) {
  return k == RuleKind::deterministic ? "deterministic" : "stochastic";
}

std::vector<DenseMatrix> dense_factors(const GlobalSystem& g) {
  if (g.kind == RuleKind::stochastic) return g.lifted_dense;
  std::vector<DenseMatrix> out;
  out.reserve(g.lifted_logical.size());
  for (const auto& l : g.lifted_logical) out.push_back(l.dense());
  return out;
}

StochasticMatrix global_matrix(const GlobalSystem& g) {
  if (g.kind == RuleKind::stochastic) return *g.q;
  return StochasticMatrix(g.m->dense());
}

struct Sink {
  std::ostream* stream = nullptr;
  std::ofstream file;
  bool to_file = false;
  std::string path;
};

// "-" streams to the command's stdout; anything else opens a file.
Sink open_sink(const std::string& out_path, std::ostream& out) {
  Sink s;
  if (out_path.empty() || out_path == "-") {
    s.stream = &out;
    return s;
  }
  s.file.open(out_path, std::ios::binary);
  if (!s.file) throw ValidationError("cannot write output file '" + out_path + "'");
  s.stream = &s.file;
  s.to_file = true;
  s.path = out_path;
  return s;
}

ProbabilityVector joint_from_init(const InitialCondition& init, std::size_t k,
                                  const std::vector<std::size_t>& alphabets) {
  switch (init.kind) {
    case InitialCondition::Kind::state:
      return ProbabilityVector::point_mass(k, init.state);
    case InitialCondition::Kind::joint:
      if (init.joint.size() != k)
        throw ValidationError("initial distribution has dimension " +
                              std::to_string(init.joint.size()) + ", joint dimension is " +
                              std::to_string(k));
      return ProbabilityVector(init.joint);
    case InitialCondition::Kind::factors: {
      std::vector<ProbabilityVector> factors;
      if (init.factors.size() != alphabets.size())
        throw ValidationError("initial condition has " + std::to_string(init.factors.size()) +
                              " factors, model has " + std::to_string(alphabets.size()) +
                              " nodes");
      for (std::size_t i = 0; i < init.factors.size(); ++i) {
        if (init.factors[i].size() != alphabets[i])
          throw ValidationError("initial factor " + std::to_string(i + 1) + " has dimension " +
                                std::to_string(init.factors[i].size()) + ", node alphabet is " +
                                std::to_string(alphabets[i]));
        factors.emplace_back(init.factors[i]);
      }
      return ProbabilityVector(FactorState(std::move(factors)).joint());
    }
  }
  throw ValidationError("unreachable initial-condition kind");
}

FactorState factors_from_init(const InitialCondition& init,
                              const std::vector<std::size_t>& alphabets, std::size_t k) {
  if (init.kind == InitialCondition::Kind::state) {
    if (init.state < 1 || init.state > k)
      throw ValidationError("state " + std::to_string(init.state) + " outside [1, " +
                            std::to_string(k) + "]");
    return FactorState::point_mass(alphabets, init.state);
  }
  if (init.kind == InitialCondition::Kind::joint) {
    if (alphabets.size() == 1 && init.joint.size() == alphabets[0])
      return FactorState({ProbabilityVector(init.joint)});
    throw ValidationError(
        "this mode needs a factor initial condition (per-node blocks separated by ';')");
  }
  if (init.factors.size() != alphabets.size())
    throw ValidationError("initial condition has " + std::to_string(init.factors.size()) +
                          " factors, model has " + std::to_string(alphabets.size()) + " nodes");
  std::vector<ProbabilityVector> factors;
  for (std::size_t i = 0; i < init.factors.size(); ++i) {
    if (init.factors[i].size() != alphabets[i])
      throw ValidationError("initial factor " + std::to_string(i + 1) + " has dimension " +
                            std::to_string(init.factors[i].size()) + ", node alphabet is " +
                            std::to_string(alphabets[i]));
    factors.emplace_back(init.factors[i]);
  }
  return FactorState(std::move(factors));
}

FactorState uniform_factors(const std::vector<std::size_t>& alphabets) {
  std::vector<ProbabilityVector> factors;
  for (std::size_t k : alphabets)
    factors.emplace_back(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  return FactorState(std::move(factors));
}

}  // namespace

int cmd_validate(const std::string& model_path, const CommonOptions& common, std::ostream& out,
                 std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const ModelFile m = load_with_flags(model_path, common);
    std::vector<std::string> notes;
    const auto violations = validate_model(m, &notes);
    for (const auto& n : notes) out << "note: " << n << '\n';
    if (!violations.empty()) {
      for (const auto& v : violations) out << v << '\n';
      out << violations.size() << " violation(s)\n";
      return kExitInvalid;
    }
    out << "ok: " << m.nodes.size() << " node(s), "
        << kind_name(m.nodes.front().rule.kind) << ", joint dimension ";
    try {
      out << build_network(m).global_dim() << '\n';
    } catch (const DimensionCapError&) {
      out << "exceeds the default cap\n";
    }
    return kExitOk;
  });
}

int cmd_assemble(const std::string& model_path, const std::string& out_dir,
                 const CommonOptions& common, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const ModelFile m = load_with_flags(model_path, common);
    std::vector<std::string> notes;
    const auto violations = validate_model(m, &notes);
    if (!violations.empty()) {
      for (const auto& v : violations) err << v << '\n';
      return kExitInvalid;
    }
    const NetworkModel model = build_network(m);
    const GlobalSystem g = assemble_global(model, common.max_dim);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + out_dir + "'");
    const fs::path dir(out_dir);

    out << "kind: " << kind_name(g.kind) << '\n';
    out << "nodes: " << g.alphabets.size() << '\n';
    out << "joint dimension: " << g.k << '\n';
    if (!g.inputs_stochastic)
      out << "note: inputs are not column-stochastic (admitted by override)\n";

    const auto write_dense = [&](const fs::path& p, const DenseMatrix& mat) {
      std::ofstream f(p, std::ios::binary);
      if (!f) throw ValidationError("cannot write '" + p.string() + "'");
      write_matrix_csv(f, mat);
      out << "wrote " << p.string() << '\n';
    };
    const auto write_delta = [&](const fs::path& p, const LogicalMatrix& mat) {
      std::ofstream f(p, std::ios::binary);
      if (!f) throw ValidationError("cannot write '" + p.string() + "'");
      f << delta_form(mat) << '\n';
      out << "wrote " << p.string() << '\n';
    };

    if (g.kind == RuleKind::deterministic) {
      write_delta(dir / "global.delta", *g.m);
      write_dense(dir / "global.csv", g.m->dense());
      for (std::size_t i = 0; i < g.lifted_logical.size(); ++i) {
        write_delta(dir / ("factor_" + std::to_string(i + 1) + ".delta"), g.lifted_logical[i]);
        write_dense(dir / ("factor_" + std::to_string(i + 1) + ".csv"),
                    g.lifted_logical[i].dense());
      }
    } else {
      write_dense(dir / "global.csv", g.q->dense());
      for (std::size_t i = 0; i < g.lifted_dense.size(); ++i)
        write_dense(dir / ("factor_" + std::to_string(i + 1) + ".csv"), g.lifted_dense[i]);
    }
    return kExitOk;
  });
}

int cmd_simulate(const std::string& model_path, const SimulateOptions& opt,
                 const CommonOptions& common, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const ModelFile m = load_with_flags(model_path, common);
    std::vector<std::string> notes;
    const auto violations = validate_model(m, &notes);
    if (!violations.empty()) {
      for (const auto& v : violations) err << v << '\n';
      return kExitInvalid;
    }
    const NetworkModel model = build_network(m);
    const GlobalSystem g = assemble_global(model, common.max_dim);

    std::string mode = opt.mode;
    if (mode == "deterministic") mode = "det";
    if (mode == "monte-carlo" || mode == "montecarlo") mode = "mc";
    if (mode != "det" && mode != "independent" && mode != "conditional" && mode != "mc")
      throw ValidationError("unknown mode '" + opt.mode +
                            "' (expected det, independent, conditional, or mc)");

    std::optional<InitialCondition> parsed;
    if (!opt.init.empty()) parsed = parse_initial(opt.init);

    std::vector<std::pair<std::string, std::string>> footer;
    footer.emplace_back("mode", mode);

    Sink sink = open_sink(opt.out_path, out);

    if (mode == "det") {
      if (g.kind != RuleKind::deterministic)
        throw ValidationError("mode det needs a deterministic model");
      std::size_t x0 = 1;
      if (parsed) {
        if (parsed->kind != InitialCondition::Kind::state)
          throw ValidationError("deterministic mode takes an integer initial state");
        x0 = parsed->state;
      }
      if (x0 < 1 || x0 > g.k)
        throw ValidationError("state " + std::to_string(x0) + " outside [1, " +
                              std::to_string(g.k) + "]");
      auto traj = simulate_deterministic(*g.m, x0, opt.steps);
      auto states = traj.states;
      while (states.size() < opt.steps + 1)
        states.push_back(step_deterministic(*g.m, states.back()));
      states.resize(opt.steps + 1);
      if (traj.transient) footer.emplace_back("transient", std::to_string(*traj.transient));
      if (traj.cycle_length)
        footer.emplace_back("cycle_length", std::to_string(*traj.cycle_length));
      write_state_csv(*sink.stream, states, g.alphabets, footer);
    } else if (mode == "independent") {
      const auto lifted = dense_factors(g);
      const FactorState f0 = parsed ? factors_from_init(*parsed, g.alphabets, g.k)
                                    : uniform_factors(g.alphabets);
      SimulationOptions so;
      so.t_max = opt.steps;
      so.stop_on_stationary = false;
      const auto traj = simulate_independent(lifted, f0, so);
      if (traj.stationary_at)
        footer.emplace_back("stationary_at", std::to_string(*traj.stationary_at));
      if (traj.renormalized) footer.emplace_back("renormalized", "true");
      write_distribution_csv(*sink.stream, traj.joints, footer);
    } else if (mode == "conditional") {
      const StochasticMatrix q = global_matrix(g);
      const ProbabilityVector p0 =
          parsed ? joint_from_init(*parsed, g.k, g.alphabets)
                 : ProbabilityVector(std::vector<double>(g.k, 1.0 / static_cast<double>(g.k)));
      SimulationOptions so;
      so.t_max = opt.steps;
      so.stop_on_stationary = false;
      const auto traj = simulate_conditional(q, p0, so);
      if (traj.stationary_at)
        footer.emplace_back("stationary_at", std::to_string(*traj.stationary_at));
      if (traj.renormalized) footer.emplace_back("renormalized", "true");
      write_distribution_csv(*sink.stream, traj.joints, footer);
    } else {  // mc
      const auto lifted = dense_factors(g);
      const ProbabilityVector p0 =
          parsed ? joint_from_init(*parsed, g.k, g.alphabets)
                 : ProbabilityVector(std::vector<double>(g.k, 1.0 / static_cast<double>(g.k)));
      const auto emp = monte_carlo_oracle(lifted, p0, opt.steps, opt.samples, opt.seed);
      footer.emplace_back("samples", std::to_string(opt.samples));
      footer.emplace_back("seed", std::to_string(opt.seed));
      std::vector<ProbabilityVector> joints;
      joints.reserve(emp.size());
      for (const auto& row : emp) joints.push_back(ProbabilityVector::raw(row));
      write_distribution_csv(*sink.stream, joints, footer);
    }

    if (sink.to_file) err << "wrote " << sink.path << '\n';
    return kExitOk;
  });
}

int cmd_compare(const std::string& model_path, const CompareOptions& opt,
                const CommonOptions& common, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const ModelFile m = load_with_flags(model_path, common);
    std::vector<std::string> notes;
    const auto violations = validate_model(m, &notes);
    if (!violations.empty()) {
      for (const auto& v : violations) err << v << '\n';
      return kExitInvalid;
    }
    const NetworkModel model = build_network(m);
    if (model.kind() != RuleKind::stochastic)
      throw ValidationError("compare needs a stochastic model; deterministic rules have a "
                            "single trajectory");
    const GlobalSystem g = assemble_global(model, common.max_dim);

    const FactorState f0 =
        opt.init.empty() ? uniform_factors(g.alphabets)
                         : factors_from_init(parse_initial(opt.init), g.alphabets, g.k);
    const auto rep = compare_models(g.lifted_dense, f0, opt.steps, opt.threshold, common.max_dim);

    std::vector<std::vector<double>> rows;
    rows.reserve(rep.l1.size());
    for (std::size_t t = 0; t < rep.l1.size(); ++t)
      rows.push_back({static_cast<double>(t), rep.l1[t]});
    std::vector<std::pair<std::string, std::string>> footer;
    footer.emplace_back("max", format_real(rep.max));
    footer.emplace_back("argmax", std::to_string(rep.argmax));
    footer.emplace_back("first_exceedance",
                        rep.first_exceedance ? std::to_string(*rep.first_exceedance) : "none");
    footer.emplace_back("threshold", format_real(rep.threshold));

    Sink sink = open_sink(opt.out_path, out);
    write_trajectory_csv(*sink.stream, {"t", "d"}, rows, footer);
    if (sink.to_file) err << "wrote " << sink.path << '\n';
    return kExitOk;
  });
}

int cmd_check(const std::string& model_path, const CheckOptions& opt, const CommonOptions& common,
              std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const ModelFile m = load_with_flags(model_path, common);
    std::vector<std::string> notes;
    const auto violations = validate_model(m, &notes);
    if (!violations.empty()) {
      for (const auto& v : violations) err << v << '\n';
      return kExitInvalid;
    }
    if (opt.method != "structural" && opt.method != "exact" && opt.method != "sampled" &&
        opt.method != "all")
      throw ValidationError("unknown method '" + opt.method +
                            "' (expected structural, exact, sampled, or all)");

    const NetworkModel model = build_network(m);
    const GlobalSystem g = assemble_global(model, common.max_dim);
    const HOperator h(dense_factors(g), m.allow_substochastic, kStochasticEps, common.max_dim);

    out << "nodes: " << h.n() << ", joint dimension: " << h.k() << '\n';
    if (h.non_stochastic_input())
      out << "note: inputs are not column-stochastic; residuals computed on the raw matrices\n";

    const auto print_witnessed = [&](const ConsistencyVerdict& v, const char* method) {
      out << "verdict: inconsistent (" << method << ")\n";
      out << "residual: " << fmt_residual(v.residual) << " (tolerance " << fmt_residual(v.tolerance)
          << ")\n";
      if (v.witness) out << "witness: " << fmt_vec4(v.witness->values()) << '\n';
      if (!v.note.empty()) out << "note: " << v.note << '\n';
    };

    int code = kExitUncertified;
    const auto run_structural = [&]() -> std::optional<int> {
      const auto s = check_structural_sufficient(h.lifted());
      if (s.satisfied) {
        out << "structural: satisfied (constant-column nodes:";
        for (std::size_t id : s.constant_column_ids) out << ' ' << id;
        out << ")\n";
        out << "verdict: consistent (structural)\n";
        return kExitOk;
      }
      out << "structural: not satisfied (proves nothing by itself)\n";
      return std::nullopt;
    };
    const auto run_exact = [&](bool fall_back_on_cap) -> std::optional<int> {
      try {
        const auto v = check_consistency_exact(h, opt.tol);
        if (v.status == ConsistencyStatus::consistent) {
          out << "exact: coefficient identity verified over " << v.samples_used
              << " index multisets (largest gap " << fmt_residual(v.residual) << ")\n";
          out << "verdict: consistent (exact)\n";
          return kExitOk;
        }
        out << "exact: coefficient identity fails\n";
        print_witnessed(v, "exact");
        return kExitInconsistent;
      } catch (const DimensionCapError&) {
        if (!fall_back_on_cap) {
          err << "error: the exact check enumerates k^n terms and the cap was exceeded; "
                 "use --method sampled\n";
          return kExitDimCap;
        }
        out << "exact: term cap exceeded, falling back to sampled\n";
        return std::nullopt;
      }
    };
    const auto run_sampled = [&]() -> int {
      const auto v = check_consistency_sampled(h, opt.samples, opt.tol, opt.seed);
      if (v.status == ConsistencyStatus::inconsistent) {
        print_witnessed(v, "sampled");
        return kExitInconsistent;
      }
      out << "sampled: the two laws agree at all " << v.samples_used
          << " sampled points (max residual " << fmt_residual(v.residual) << ")\n";
      out << "verdict: consistent at samples only (not a proof)\n";
      return kExitUncertified;
    };

    if (opt.method == "structural") {
      const auto r = run_structural();
      code = r ? *r : kExitUncertified;
      if (!r) out << "verdict: not certified (structural condition absent)\n";
    } else if (opt.method == "exact") {
      const auto r = run_exact(false);
      code = r ? *r : kExitDimCap;
    } else if (opt.method == "sampled") {
      code = run_sampled();
    } else {
      std::optional<int> r = run_structural();
      if (!r) r = run_exact(true);
      if (!r) r = run_sampled();
      code = *r;
    }

    if (!opt.point.empty()) {
      const auto init = parse_initial(opt.point);
      if (init.kind != InitialCondition::Kind::joint)
        throw ValidationError("--point takes a joint distribution (comma-separated values)");
      const ProbabilityVector p = joint_from_init(init, h.k(), h.alphabets());
      const double r = point_consistency(h, p);
      out << "point " << fmt_vec4(p.values()) << ": residual " << fmt_residual(r) << "; the two "
          << (r <= opt.tol ? "laws agree at this point" : "laws differ at this point") << '\n';
      out << "  power law:   " << fmt_vec4(h_apply_power(h, p).values()) << '\n';
      out << "  reduced law: " << fmt_vec4(h_apply_reduced(h, p).values()) << '\n';
    }
    return code;
  });
}

}  // namespace stplogic::cli

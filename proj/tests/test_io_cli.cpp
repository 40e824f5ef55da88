#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stplogic/cli.hpp"
#include "stplogic/model_io.hpp"
#include "stplogic/network.hpp"

using namespace stplogic;
namespace fs = std::filesystem;

namespace {

std::string models_dir() { return STPLOGIC_MODELS_DIR; }
std::string cli_bin() { return STPLOGIC_CLI_BIN; }

std::string model_path(const std::string& name) { return models_dir() + "/" + name; }

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("stplogic_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CmdResult {
  int code = 0;
  std::string out;
  std::string err;
};

template <typename Fn>
CmdResult run_cmd(Fn&& fn) {
  std::ostringstream out, err;
  CmdResult r;
  r.code = fn(out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

CmdResult run_proc(const std::string& args) {
  const std::string cmd = cli_bin() + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf;
  CmdResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WEXITSTATUS(status);
  return r;
}

const cli::CommonOptions kPlain{};
const cli::CommonOptions kAllow{/*allow_substochastic=*/true, kDefaultDimCap};

double row_sum(const std::vector<double>& row) {
  double s = 0.0;
  for (std::size_t i = 1; i < row.size(); ++i) s += row[i];
  return s;
}

double row_linf(const std::vector<double>& row, const std::vector<double>& want) {
  REQUIRE(row.size() == want.size() + 1);
  double d = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) d = std::max(d, std::abs(row[i + 1] - want[i]));
  return d;
}

std::string footer_value(const TrajectoryFile& f, const std::string& key) {
  for (const auto& [k, v] : f.footer)
    if (k == key) return v;
  return "";
}

ModelFile small_stochastic_model(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  ModelFile m;
  const std::size_t n = 2;
  for (std::size_t id = 1; id <= n; ++id) {
    ModelNode node;
    node.id = id;
    node.k = 2;
    node.neighbors = {1, 2};
    node.rule.kind = RuleKind::stochastic;
    node.rule.lifted = true;
    node.rule.matrix.assign(2, std::vector<double>(4, 0.0));
    for (std::size_t j = 0; j < 4; ++j) {
      const double a = u(rng), b = u(rng);
      node.rule.matrix[0][j] = a / (a + b);
      node.rule.matrix[1][j] = b / (a + b);
    }
    m.nodes.push_back(std::move(node));
  }
  return m;
}

ModelFile small_deterministic_model(std::mt19937& rng) {
  ModelFile m;
  for (std::size_t id = 1; id <= 2; ++id) {
    ModelNode node;
    node.id = id;
    node.k = 2;
    node.neighbors = {1, 2};
    node.rule.kind = RuleKind::deterministic;
    for (int j = 0; j < 4; ++j) node.rule.table.push_back(1 + rng() % 2);
    m.nodes.push_back(std::move(node));
  }
  return m;
}

}  // namespace

TEST_CASE("model files round-trip through parse and serialize") {
  for (const char* name : {"two_node_mixing.json", "two_node_consistent.json",
                           "two_node_substochastic.json", "boolean_and_not.json",
                           "boolean_ring_10.json"}) {
    const ModelFile m = load_model(model_path(name));
    const std::string once = serialize_model(m);
    const std::string twice = serialize_model(parse_model(once));
    CHECK(once == twice);
  }

  const ModelFile m = load_model(model_path("two_node_mixing.json"));
  CHECK(m.version == "1");
  CHECK(!m.allow_substochastic);
  REQUIRE(m.nodes.size() == 2);
  CHECK(m.nodes[0].rule.kind == RuleKind::stochastic);
  CHECK(m.nodes[0].rule.lifted);
  CHECK(m.nodes[0].rule.matrix[0][2] == 1.0);
}

TEST_CASE("parse rejects malformed documents") {
  CHECK_THROWS_AS(parse_model("{"), ParseError);
  CHECK_THROWS_AS(parse_model("[]"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"nodes": []})"), ParseError);  // version missing
  CHECK_THROWS_AS(parse_model(R"({"version": "2", "nodes": []})"), ParseError);
  CHECK_THROWS_AS(
      parse_model(R"({"version": "1", "nodes": [{"id": 1, "k": 2, "rule": {"type": "odd"}}]})"),
      ParseError);
  CHECK_THROWS_AS(parse_model(R"({"version": "1", "nodes": [{"id": 1, "k": 2,
      "rule": {"type": "deterministic", "table": [-1, 2]}}]})"),
                  ParseError);
}

TEST_CASE("validation lists every violation") {
  ModelFile m = load_model(model_path("two_node_substochastic.json"));
  auto violations = validate_model(m);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == "node 1 column 4 sums to 0.6");

  std::vector<std::string> notes;
  m.allow_substochastic = true;
  violations = validate_model(m, &notes);
  CHECK(violations.empty());
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].find("sums to 0.6") != std::string::npos);

  // Several independent defects are all reported.
  ModelFile bad = load_model(model_path("two_node_mixing.json"));
  bad.nodes[0].neighbors = {1, 5};
  bad.nodes[1].rule.matrix[0][1] += 0.2;
  const auto many = validate_model(bad);
  CHECK(many.size() == 2);

  ModelFile empty;
  CHECK(validate_model(empty) == std::vector<std::string>{"model has no nodes"});
}

TEST_CASE("validate_model and build_network accept the same documents") {
  std::mt19937 rng(0x10u);
  for (int rep = 0; rep < 60; ++rep) {
    ModelFile m = rep % 2 == 0 ? small_stochastic_model(rng) : small_deterministic_model(rng);
    switch (rng() % 10) {
      case 0: m.nodes[0].id = 3; break;
      case 1: m.nodes[1].neighbors = {1, 7}; break;
      case 2: m.nodes[0].neighbors = {2, 1}; break;
      case 3:
        if (m.nodes[0].rule.kind == RuleKind::deterministic)
          m.nodes[0].rule.table.pop_back();
        else
          m.nodes[0].rule.matrix[0].pop_back();
        break;
      case 4:
        if (m.nodes[0].rule.kind == RuleKind::deterministic)
          m.nodes[0].rule.table[0] = 9;
        else
          m.nodes[0].rule.matrix[1][2] += 0.3;
        break;
      case 5: m.nodes[1].k = 0; break;
      case 6:
        m.nodes[1].rule = m.nodes[1].rule.kind == RuleKind::deterministic
                              ? small_stochastic_model(rng).nodes[1].rule
                              : small_deterministic_model(rng).nodes[1].rule;
        break;
      default: break;  // leave valid
    }
    const bool clean = validate_model(m).empty();
    bool built = true;
    try {
      const NetworkModel model = build_network(m);
      assemble_global(model);
    } catch (const std::exception&) {
      built = false;
    }
    CHECK(clean == built);
  }
}

TEST_CASE("matrix CSV and delta forms round-trip bit for bit") {
  std::mt19937 rng(0x11u);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DenseMatrix m(5, 7);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 7; ++j) m(i, j) = u(rng);
  m(0, 0) = 0.1;
  m(1, 1) = 1.0 / 3.0;
  m(2, 2) = 1e-300;
  m(3, 3) = 0.0;
  m(4, 4) = 1e17;

  std::ostringstream out;
  write_matrix_csv(out, m);
  std::istringstream in(out.str());
  const DenseMatrix back = read_matrix_csv(in);
  CHECK(back.max_abs_diff(m) == 0.0);

  const LogicalMatrix l(4, {1, 3, 2, 4});
  CHECK(delta_form(l) == "delta 4 [1,3,2,4]");
  CHECK(parse_delta_form(delta_form(l)) == l);
  CHECK(parse_delta_form("delta 2 [1,2]") == LogicalMatrix::identity(2));
  CHECK_THROWS_AS(parse_delta_form("delta 2 1,2"), ParseError);
  CHECK_THROWS_AS(parse_delta_form("delta 2 [0,1]"), ParseError);

  std::istringstream empty("# only a comment\n");
  CHECK_THROWS_AS(read_matrix_csv(empty), ParseError);
}

TEST_CASE("trajectory CSV round-trips rows and footer") {
  std::vector<std::vector<double>> rows = {{0, 0.25, 0.75}, {1, 0.1234567890123456, 0.5}};
  std::ostringstream out;
  write_trajectory_csv(out, {"t", "s1", "s2"}, rows, {{"mode", "conditional"}, {"seed", "9"}});
  std::istringstream in(out.str());
  const TrajectoryFile f = read_trajectory_csv(in);
  CHECK(f.columns == std::vector<std::string>{"t", "s1", "s2"});
  REQUIRE(f.rows.size() == 2);
  CHECK(f.rows[1][1] == rows[1][1]);
  CHECK(footer_value(f, "mode") == "conditional");
  CHECK(footer_value(f, "seed") == "9");

  std::istringstream headerless("0,1\n");
  CHECK_THROWS_AS(read_trajectory_csv(headerless), ParseError);
}

TEST_CASE("initial conditions parse in all three shapes") {
  const auto state = parse_initial("3");
  CHECK(state.kind == InitialCondition::Kind::state);
  CHECK(state.state == 3);

  const auto joint = parse_initial("0.2,0.2,0.3,0.3");
  CHECK(joint.kind == InitialCondition::Kind::joint);
  CHECK(joint.joint == std::vector<double>{0.2, 0.2, 0.3, 0.3});

  const auto factors = parse_initial("0.4,0.6;0.5,0.5");
  CHECK(factors.kind == InitialCondition::Kind::factors);
  REQUIRE(factors.factors.size() == 2);
  CHECK(factors.factors[0] == std::vector<double>{0.4, 0.6});

  CHECK_THROWS_AS(parse_initial("0.4,oops"), ParseError);
  CHECK_THROWS_AS(parse_initial("0"), ParseError);
  CHECK_THROWS_AS(parse_initial(""), ParseError);

  const fs::path dir = fresh_dir("init");
  {
    std::ofstream f(dir / "joint.txt");
    f << "0.2,0.2,0.3,0.3\n";
  }
  const auto from_file = parse_initial((dir / "joint.txt").string());
  CHECK(from_file.kind == InitialCondition::Kind::joint);
  CHECK(from_file.joint.size() == 4);

  {
    std::ofstream f(dir / "factors.txt");
    f << "0.4,0.6\n0.5,0.5\n";
  }
  const auto ff = parse_initial((dir / "factors.txt").string());
  CHECK(ff.kind == InitialCondition::Kind::factors);
  CHECK(ff.factors.size() == 2);

  {
    std::ofstream f(dir / "traj.csv");
    std::vector<std::vector<double>> rows = {{0, 0.25, 0.75}, {1, 0.5, 0.5}};
    write_trajectory_csv(f, {"t", "s1", "s2"}, rows, {{"mode", "conditional"}});
  }
  const auto resumed = parse_initial((dir / "traj.csv").string());
  CHECK(resumed.kind == InitialCondition::Kind::joint);
  CHECK(resumed.joint == std::vector<double>{0.5, 0.5});

  {
    std::ofstream f(dir / "det.csv");
    f << "t,x1,x2\n0,1,1\n";
  }
  CHECK_THROWS_AS(parse_initial((dir / "det.csv").string()), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("cmd_validate reports and exits per contract") {
  auto ok = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_validate(model_path("two_node_mixing.json"), kPlain, o, e);
  });
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out.find("ok: 2 node(s), stochastic, joint dimension 4") != std::string::npos);

  auto sub = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_validate(model_path("two_node_substochastic.json"), kPlain, o, e);
  });
  CHECK(sub.code == cli::kExitInvalid);
  CHECK(sub.out.find("node 1 column 4 sums to 0.6") != std::string::npos);

  auto admitted = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_validate(model_path("two_node_substochastic.json"), kAllow, o, e);
  });
  CHECK(admitted.code == cli::kExitOk);
  CHECK(admitted.out.find("note:") != std::string::npos);

  auto missing = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_validate(model_path("no_such_file.json"), kPlain, o, e);
  });
  CHECK(missing.code == cli::kExitInvalid);
  CHECK(missing.err.find("parse error") != std::string::npos);
}

TEST_CASE("cmd_assemble writes the published global matrix") {
  const fs::path dir = fresh_dir("assemble");
  auto r = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_assemble(model_path("two_node_mixing.json"), dir.string(), kPlain, o, e);
  });
  REQUIRE(r.code == cli::kExitOk);
  std::ifstream gin(dir / "global.csv");
  const DenseMatrix q = read_matrix_csv(gin);
  const DenseMatrix want = DenseMatrix::from_rows({{0.12, 0.1, 0.5, 0.14},
                                                   {0.18, 0.4, 0.5, 0.06},
                                                   {0.28, 0.1, 0.0, 0.56},
                                                   {0.42, 0.4, 0.0, 0.24}});
  CHECK(q.max_abs_diff(want) < 1e-12);
  std::ifstream f1(dir / "factor_1.csv");
  CHECK(read_matrix_csv(f1).rows() == 2);

  auto det = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_assemble(model_path("boolean_and_not.json"), dir.string(), kPlain, o, e);
  });
  REQUIRE(det.code == cli::kExitOk);
  std::ifstream din(dir / "global.delta");
  std::string line;
  std::getline(din, line);
  CHECK(line == "delta 4 [2,4,3,3]");

  // Single identity node: the global map is the identity in delta form.
  ModelFile ident;
  ModelNode node;
  node.id = 1;
  node.k = 2;
  node.neighbors = {1};
  node.rule.kind = RuleKind::deterministic;
  node.rule.table = {1, 2};
  ident.nodes.push_back(node);
  save_model(ident, (dir / "identity.json").string());
  auto idr = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_assemble((dir / "identity.json").string(), dir.string(), kPlain, o, e);
  });
  REQUIRE(idr.code == cli::kExitOk);
  std::ifstream iin(dir / "global.delta");
  std::getline(iin, line);
  CHECK(line == "delta 2 [1,2]");

  auto sub = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_assemble(model_path("two_node_substochastic.json"), dir.string(), kPlain, o,
                             e);
  });
  CHECK(sub.code == cli::kExitInvalid);
  CHECK(sub.err.find("sums to 0.6") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cmd_simulate reproduces the published trajectories") {
  cli::SimulateOptions opt;
  opt.mode = "independent";
  opt.init = "0.4,0.6;0.5,0.5";
  opt.steps = 39;
  auto ind = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_simulate(model_path("two_node_mixing.json"), opt, kPlain, o, e);
  });
  REQUIRE(ind.code == cli::kExitOk);
  std::istringstream iin(ind.out);
  const TrajectoryFile itraj = read_trajectory_csv(iin);
  CHECK(itraj.columns == std::vector<std::string>{"t", "s1", "s2", "s3", "s4"});
  REQUIRE(itraj.rows.size() == 40);
  CHECK(row_linf(itraj.rows[39], {0.2215, 0.2665, 0.2324, 0.2796}) < 5e-5);
  for (const auto& row : itraj.rows) CHECK(std::abs(row_sum(row) - 1.0) <= 1e-9);
  CHECK(footer_value(itraj, "mode") == "independent");
  CHECK(!footer_value(itraj, "stationary_at").empty());

  opt.mode = "conditional";
  opt.init = "0.2,0.2,0.3,0.3";
  auto cond = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_simulate(model_path("two_node_mixing.json"), opt, kPlain, o, e);
  });
  REQUIRE(cond.code == cli::kExitOk);
  std::istringstream cin_(cond.out);
  const TrajectoryFile ctraj = read_trajectory_csv(cin_);
  REQUIRE(ctraj.rows.size() == 40);
  CHECK(row_linf(ctraj.rows[39], {0.2096, 0.2869, 0.2368, 0.2668}) < 5e-5);

  // Identity network holds its state.
  const fs::path dir = fresh_dir("simulate");
  ModelFile ident;
  ModelNode node;
  node.id = 1;
  node.k = 4;
  node.neighbors = {1};
  node.rule.kind = RuleKind::deterministic;
  node.rule.table = {1, 2, 3, 4};
  ident.nodes.push_back(node);
  save_model(ident, (dir / "identity4.json").string());
  cli::SimulateOptions dopt;
  dopt.mode = "det";
  dopt.init = "3";
  dopt.steps = 5;
  auto det = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_simulate((dir / "identity4.json").string(), dopt, kPlain, o, e);
  });
  REQUIRE(det.code == cli::kExitOk);
  std::istringstream din(det.out);
  const TrajectoryFile dtraj = read_trajectory_csv(din);
  CHECK(dtraj.columns == std::vector<std::string>{"t", "x1"});
  REQUIRE(dtraj.rows.size() == 6);
  for (const auto& row : dtraj.rows) CHECK(row[1] == 3.0);
  fs::remove_all(dir);
}

TEST_CASE("cmd_simulate monte carlo runs are reproducible by seed") {
  cli::SimulateOptions opt;
  opt.mode = "mc";
  opt.init = "0.2,0.2,0.3,0.3";
  opt.steps = 3;
  opt.samples = 20000;
  opt.seed = 99;
  const auto run = [&] {
    return run_cmd([&](std::ostream& o, std::ostream& e) {
      return cli::cmd_simulate(model_path("two_node_mixing.json"), opt, kPlain, o, e);
    });
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
  opt.seed = 100;
  CHECK(run().out != a.out);

  std::istringstream in(a.out);
  const TrajectoryFile f = read_trajectory_csv(in);
  REQUIRE(f.rows.size() == 4);
  CHECK(row_linf(f.rows[1], {0.2360, 0.2840, 0.2440, 0.2360}) < 0.01);
  CHECK(footer_value(f, "samples") == "20000");
}

TEST_CASE("cmd_simulate rejects mismatched modes and initials") {
  cli::SimulateOptions opt;
  opt.mode = "det";
  opt.init = "1";
  auto det_on_stochastic = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_simulate(model_path("two_node_mixing.json"), opt, kPlain, o, e);
  });
  CHECK(det_on_stochastic.code == cli::kExitInvalid);
  CHECK(det_on_stochastic.err.find("deterministic") != std::string::npos);

  opt.mode = "independent";
  opt.init = "0.2,0.2,0.3,0.3";
  auto joint_in_independent = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_simulate(model_path("two_node_mixing.json"), opt, kPlain, o, e);
  });
  CHECK(joint_in_independent.code == cli::kExitInvalid);

  opt.mode = "conditional";
  opt.init = "0.9,0.2,0.3,0.3";
  auto off_simplex = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_simulate(model_path("two_node_mixing.json"), opt, kPlain, o, e);
  });
  CHECK(off_simplex.code == cli::kExitInvalid);

  opt.init = "0.2,0.2,0.3,0.3";
  opt.mode = "warp";
  auto bad_mode = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_simulate(model_path("two_node_mixing.json"), opt, kPlain, o, e);
  });
  CHECK(bad_mode.code == cli::kExitInvalid);

  // Stochastic modes on a deterministic model use its 0/1 matrices.
  cli::SimulateOptions promo;
  promo.mode = "conditional";
  promo.init = "4";
  promo.steps = 2;
  auto promoted = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_simulate(model_path("boolean_and_not.json"), promo, kPlain, o, e);
  });
  CHECK(promoted.code == cli::kExitOk);
}

TEST_CASE("cmd_compare measures the documented divergences") {
  cli::CompareOptions opt;
  opt.init = "0.4,0.6;0.5,0.5";
  opt.steps = 39;
  auto mix = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_compare(model_path("two_node_mixing.json"), opt, kPlain, o, e);
  });
  REQUIRE(mix.code == cli::kExitOk);
  std::istringstream min(mix.out);
  const TrajectoryFile mf = read_trajectory_csv(min);
  CHECK(mf.columns == std::vector<std::string>{"t", "d"});
  REQUIRE(mf.rows.size() == 40);
  CHECK(mf.rows[0][1] <= 1e-15);
  for (std::size_t t = 1; t < mf.rows.size(); ++t) CHECK(mf.rows[t][1] > 1e-3);
  CHECK(footer_value(mf, "first_exceedance") == "1");

  auto cons = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_compare(model_path("two_node_consistent.json"), opt, kPlain, o, e);
  });
  REQUIRE(cons.code == cli::kExitOk);
  std::istringstream cin_(cons.out);
  const TrajectoryFile cf = read_trajectory_csv(cin_);
  for (const auto& row : cf.rows) CHECK(row[1] <= 1e-12);
  CHECK(footer_value(cf, "first_exceedance") == "none");

  auto det = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_compare(model_path("boolean_and_not.json"), opt, kPlain, o, e);
  });
  CHECK(det.code == cli::kExitInvalid);
}

TEST_CASE("cmd_check verdicts, exit codes, and point probe") {
  cli::CheckOptions all;
  auto mixing = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("two_node_mixing.json"), all, kPlain, o, e);
  });
  CHECK(mixing.code == cli::kExitInconsistent);
  CHECK(mixing.out.find("witness:") != std::string::npos);

  auto consistent = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("two_node_consistent.json"), all, kPlain, o, e);
  });
  CHECK(consistent.code == cli::kExitOk);
  CHECK(consistent.out.find("structural: satisfied") != std::string::npos);

  auto refused = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("two_node_substochastic.json"), all, kPlain, o, e);
  });
  CHECK(refused.code == cli::kExitInvalid);
  CHECK(refused.err.find("node 1 column 4 sums to 0.6") != std::string::npos);

  cli::CheckOptions probed;
  probed.point = "0,0.5,0,0.5";
  auto admitted = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("two_node_substochastic.json"), probed, kAllow, o, e);
  });
  CHECK(admitted.code == cli::kExitInconsistent);
  CHECK(admitted.out.find("laws agree at this point") != std::string::npos);
  CHECK(admitted.out.find("[0.1050, 0.2450, 0.1350, 0.3150]") != std::string::npos);
  CHECK(admitted.out.find("not column-stochastic") != std::string::npos);

  cli::CheckOptions structural;
  structural.method = "structural";
  auto s = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("two_node_mixing.json"), structural, kPlain, o, e);
  });
  CHECK(s.code == cli::kExitUncertified);

  cli::CheckOptions sampled;
  sampled.method = "sampled";
  sampled.samples = 500;
  auto sc = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("two_node_consistent.json"), sampled, kPlain, o, e);
  });
  CHECK(sc.code == cli::kExitUncertified);
  CHECK(sc.out.find("not a proof") != std::string::npos);
  auto si = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("two_node_mixing.json"), sampled, kPlain, o, e);
  });
  CHECK(si.code == cli::kExitInconsistent);

  // Twelve Boolean nodes push k^n past the exact cap; sampled still answers.
  cli::CheckOptions exact;
  exact.method = "exact";
  auto capped = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("boolean_ring_10.json"), exact, kPlain, o, e);
  });
  CHECK(capped.code == cli::kExitDimCap);
  CHECK(capped.err.find("--method sampled") != std::string::npos);

  cli::CheckOptions fallback;
  fallback.samples = 1124;  // 1024 vertices + 100 interior points
  auto fb = run_cmd([&](std::ostream& o, std::ostream& e) {
    return cli::cmd_check(model_path("boolean_ring_10.json"), fallback, kPlain, o, e);
  });
  CHECK(fb.out.find("falling back to sampled") != std::string::npos);
  CHECK((fb.code == cli::kExitUncertified || fb.code == cli::kExitInconsistent));
}

TEST_CASE("the built binary honors the exit code table") {
  auto ok = run_proc("validate " + model_path("two_node_mixing.json"));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("ok:") != std::string::npos);

  auto invalid = run_proc("validate " + model_path("two_node_substochastic.json"));
  CHECK(invalid.code == 1);
  CHECK(invalid.out.find("node 1 column 4 sums to 0.6") != std::string::npos);

  auto inconsistent = run_proc("check " + model_path("two_node_mixing.json"));
  CHECK(inconsistent.code == 2);

  auto uncertified =
      run_proc("check " + model_path("two_node_consistent.json") + " --method sampled");
  CHECK(uncertified.code == 3);

  auto capped = run_proc("check " + model_path("boolean_ring_10.json") + " --method exact");
  CHECK(capped.code == 4);

  auto admitted = run_proc("check " + model_path("two_node_substochastic.json") +
                           " --allow-substochastic --point 0,0.5,0,0.5");
  CHECK(admitted.code == 2);
  CHECK(admitted.out.find("laws agree at this point") != std::string::npos);

  auto usage = run_proc("simulate");
  CHECK(usage.code == 1);

  const auto a = run_proc("simulate " + model_path("two_node_mixing.json") +
                          " --mode mc --init 0.2,0.2,0.3,0.3 --steps 2 --samples 5000 --seed 3");
  const auto b = run_proc("simulate " + model_path("two_node_mixing.json") +
                          " --mode mc --init 0.2,0.2,0.3,0.3 --steps 2 --samples 5000 --seed 3");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

#include "stplogic/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <sstream>

namespace stplogic {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) throw ParseError("empty number field");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ParseError("bad number '" + t + "'");
  return v;
}

ModelNode parse_node(const json& nj, std::size_t position) {
  const std::string where = "nodes[" + std::to_string(position) + "]: ";
  if (!nj.is_object()) throw ParseError(where + "node entries must be objects");
  ModelNode node;
  node.id = nj.at("id").get<std::size_t>();
  node.k = nj.at("k").get<std::size_t>();
  if (nj.contains("neighbors")) node.neighbors = nj.at("neighbors").get<std::vector<std::size_t>>();

  const auto& rj = nj.at("rule");
  if (!rj.is_object()) throw ParseError(where + "'rule' must be an object");
  const std::string type = rj.at("type").get<std::string>();
  if (type == "deterministic") {
    node.rule.kind = RuleKind::deterministic;
    for (const auto& entry : rj.at("table")) {
      if (!entry.is_number_integer() || entry.get<std::int64_t>() < 0 ||
          entry.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max())
        throw ParseError(where + "table entries must be nonnegative integers");
      node.rule.table.push_back(entry.get<std::uint32_t>());
    }
  } else if (type == "stochastic") {
    node.rule.kind = RuleKind::stochastic;
    node.rule.matrix = rj.at("matrix").get<std::vector<std::vector<double>>>();
    node.rule.lifted = rj.value("lifted", false);
  } else {
    throw ParseError(where + "rule type '" + type + "' is not recognized");
  }
  return node;
}

// Rows must be rectangular before a DenseMatrix can hold them.
bool rectangular(const std::vector<std::vector<double>>& rows) {
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) return false;
  return true;
}

DenseMatrix to_dense(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.front().size());
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return DenseMatrix(rows.size(), rows.front().size(), std::move(flat));
}

bool ids_are_contiguous(const std::vector<ModelNode>& nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id != i + 1) return false;
  return true;
}

}  // namespace

ModelFile parse_model(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  try {
    if (!j.is_object()) throw ParseError("model file must be a JSON object");
    ModelFile m;
    m.version = j.at("version").get<std::string>();
    if (m.version != "1")
      throw ParseError("unsupported model version '" + m.version + "', expected \"1\"");
    m.allow_substochastic = j.value("allow_substochastic", false);
    const auto& nodes = j.at("nodes");
    if (!nodes.is_array()) throw ParseError("'nodes' must be an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) m.nodes.push_back(parse_node(nodes[i], i));
    std::stable_sort(m.nodes.begin(), m.nodes.end(),
                     [](const ModelNode& a, const ModelNode& b) { return a.id < b.id; });
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string serialize_model(const ModelFile& m) {
  json j;
  j["version"] = m.version;
  j["allow_substochastic"] = m.allow_substochastic;
  j["nodes"] = json::array();
  for (const auto& n : m.nodes) {
    json nj;
    nj["id"] = n.id;
    nj["k"] = n.k;
    nj["neighbors"] = n.neighbors;
    json rj;
    if (n.rule.kind == RuleKind::deterministic) {
      rj["type"] = "deterministic";
      rj["table"] = n.rule.table;
    } else {
      rj["type"] = "stochastic";
      rj["lifted"] = n.rule.lifted;
      rj["matrix"] = n.rule.matrix;
    }
    nj["rule"] = std::move(rj);
    j["nodes"].push_back(std::move(nj));
  }
  return j.dump(2) + "\n";
}

void save_model(const ModelFile& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write model file '" + path + "'");
  out << serialize_model(m);
}

std::vector<std::string> validate_model(const ModelFile& m, std::vector<std::string>* notes) {
  std::vector<std::string> v;
  if (m.nodes.empty()) {
    v.push_back("model has no nodes");
    return v;
  }
  if (!ids_are_contiguous(m.nodes))
    v.push_back("node ids must be exactly 1.." + std::to_string(m.nodes.size()));

  const std::size_t n = m.nodes.size();
  bool alphabets_ok = true;
  for (const auto& node : m.nodes) {
    if (node.k == 0) {
      v.push_back("node " + std::to_string(node.id) + " alphabet size must be at least 1");
      alphabets_ok = false;
    }
  }

  std::size_t joint = 1;
  bool joint_ok = alphabets_ok && ids_are_contiguous(m.nodes);
  if (joint_ok) {
    try {
      for (const auto& node : m.nodes) joint = detail::checked_mul(joint, node.k);
    } catch (const DimensionCapError&) {
      joint_ok = false;
    }
  }

  const RuleKind kind = m.nodes.front().rule.kind;
  for (const auto& node : m.nodes) {
    const std::string id = "node " + std::to_string(node.id);
    if (node.rule.kind != kind) {
      v.push_back(id + " mixes deterministic and stochastic rules");
      continue;
    }

    bool neighbors_ok = true;
    for (std::size_t u = 0; u < node.neighbors.size(); ++u) {
      if (node.neighbors[u] < 1 || node.neighbors[u] > n) {
        v.push_back(id + " neighbor " + std::to_string(node.neighbors[u]) + " is out of range");
        neighbors_ok = false;
      } else if (u > 0 && node.neighbors[u] <= node.neighbors[u - 1]) {
        v.push_back(id + " neighbors must be strictly ascending");
        neighbors_ok = false;
      }
    }
    if (!neighbors_ok || !alphabets_ok || !ids_are_contiguous(m.nodes)) continue;

    std::size_t arity = 1;
    for (std::size_t nb : node.neighbors) arity *= m.nodes[nb - 1].k;

    if (node.rule.kind == RuleKind::deterministic) {
      if (node.rule.table.size() != arity) {
        v.push_back(id + " rule has " + std::to_string(node.rule.table.size()) +
                    " columns, expected " + std::to_string(arity));
        continue;
      }
      for (std::size_t j = 0; j < node.rule.table.size(); ++j) {
        if (node.rule.table[j] < 1 || node.rule.table[j] > node.k)
          v.push_back(id + " table entry " + std::to_string(j + 1) + " is " +
                      std::to_string(node.rule.table[j]) + ", outside [1, " +
                      std::to_string(node.k) + "]");
      }
    } else {
      if (node.rule.matrix.size() != node.k) {
        v.push_back(id + " rule has " + std::to_string(node.rule.matrix.size()) +
                    " rows, expected " + std::to_string(node.k));
        continue;
      }
      if (!rectangular(node.rule.matrix)) {
        v.push_back(id + " matrix rows have unequal lengths");
        continue;
      }
      if (node.rule.lifted && !joint_ok) {
        v.push_back(id + " is lifted but the joint dimension overflows");
        continue;
      }
      const std::size_t want = node.rule.lifted ? joint : arity;
      if (node.rule.matrix.front().size() != want) {
        v.push_back(id + " rule has " + std::to_string(node.rule.matrix.front().size()) +
                    " columns, expected " + std::to_string(want));
        continue;
      }
      const auto verdict = validate_stochastic(to_dense(node.rule.matrix));
      if (!verdict.ok) {
        if (m.allow_substochastic) {
          if (notes) notes->push_back(id + " " + verdict.message + " (admitted by override)");
        } else {
          v.push_back(id + " " + verdict.message);
        }
      }
    }
  }
  return v;
}

NetworkModel build_network(const ModelFile& m) {
  if (m.nodes.empty()) throw ValidationError("model has no nodes");
  if (!ids_are_contiguous(m.nodes))
    throw ValidationError("node ids must be exactly 1.." + std::to_string(m.nodes.size()));
  std::vector<Node> nodes;
  nodes.reserve(m.nodes.size());
  for (const auto& node : m.nodes) {
    const std::string id = "node " + std::to_string(node.id);
    if (node.rule.kind == RuleKind::deterministic) {
      if (node.k == 0 || node.rule.table.empty())
        throw ValidationError(id + " needs a nonempty table over a nonempty alphabet");
      nodes.push_back(table_node(node.k, node.neighbors, node.rule.table));
    } else {
      if (node.rule.matrix.empty() || node.rule.matrix.front().empty())
        throw ValidationError(id + " needs a nonempty matrix");
      if (!rectangular(node.rule.matrix))
        throw ValidationError(id + " matrix rows have unequal lengths");
      nodes.push_back(
          stochastic_node(node.k, node.neighbors, to_dense(node.rule.matrix), node.rule.lifted));
    }
  }
  return NetworkModel(std::move(nodes), m.allow_substochastic);
}

std::string format_real(double v) {
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string delta_form(const LogicalMatrix& m) {
  std::string s = "delta " + std::to_string(m.rows()) + " [";
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (j) s += ',';
    s += std::to_string(m.col_index(j));
  }
  return s + "]";
}

LogicalMatrix parse_delta_form(const std::string& line) {
  std::istringstream in(trim(line));
  std::string word;
  std::size_t rows = 0;
  in >> word >> rows;
  if (word != "delta" || !in) throw ParseError("expected 'delta <rows> [i1,i2,...]'");
  std::string rest;
  std::getline(in, rest);
  rest = trim(rest);
  if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']')
    throw ParseError("expected 'delta <rows> [i1,i2,...]'");
  std::vector<std::uint32_t> idx;
  for (const auto& tok : split(rest.substr(1, rest.size() - 2), ',')) {
    const double d = parse_number(tok);
    if (d < 1 || d != static_cast<double>(static_cast<std::uint32_t>(d)))
      throw ParseError("bad column index '" + trim(tok) + "'");
    idx.push_back(static_cast<std::uint32_t>(d));
  }
  return LogicalMatrix(rows, std::move(idx));
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

DenseMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<double> row;
    for (const auto& tok : split(t, ',')) row.push_back(parse_number(tok));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix file has no numeric rows");
  if (!rectangular(rows)) throw ParseError("matrix rows have unequal lengths");
  return to_dense(rows);
}

void write_trajectory_csv(std::ostream& out, const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows,
                          const std::vector<std::pair<std::string, std::string>>& footer) {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << columns[c];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_real(row[c]);
    }
    out << '\n';
  }
  for (const auto& [key, value] : footer) out << "# " << key << '=' << value << '\n';
}

TrajectoryFile read_trajectory_csv(std::istream& in) {
  TrajectoryFile f;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string body = trim(t.substr(1));
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos)
        f.footer.emplace_back(body, "");
      else
        f.footer.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      continue;
    }
    if (!have_header) {
      for (auto& col : split(t, ',')) f.columns.push_back(trim(col));
      if (f.columns.empty() || f.columns.front() != "t")
        throw ParseError("trajectory CSV must start with a t,... header row");
      have_header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& tok : split(t, ',')) row.push_back(parse_number(tok));
    if (row.size() != f.columns.size())
      throw ParseError("row has " + std::to_string(row.size()) + " fields, header has " +
                       std::to_string(f.columns.size()));
    f.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("trajectory file has no header row");
  return f;
}

void write_distribution_csv(std::ostream& out, const std::vector<ProbabilityVector>& joints,
                            const std::vector<std::pair<std::string, std::string>>& footer) {
  std::vector<std::string> columns = {"t"};
  const std::size_t k = joints.empty() ? 0 : joints.front().dim();
  for (std::size_t s = 1; s <= k; ++s) columns.push_back("s" + std::to_string(s));
  std::vector<std::vector<double>> rows;
  rows.reserve(joints.size());
  for (std::size_t t = 0; t < joints.size(); ++t) {
    std::vector<double> row = {static_cast<double>(t)};
    row.insert(row.end(), joints[t].values().begin(), joints[t].values().end());
    rows.push_back(std::move(row));
  }
  write_trajectory_csv(out, columns, rows, footer);
}

void write_state_csv(std::ostream& out, const std::vector<std::size_t>& states,
                     const std::vector<std::size_t>& alphabets,
                     const std::vector<std::pair<std::string, std::string>>& footer) {
  std::vector<std::string> columns = {"t"};
  for (std::size_t x = 1; x <= alphabets.size(); ++x) columns.push_back("x" + std::to_string(x));
  std::vector<std::vector<double>> rows;
  rows.reserve(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    std::vector<double> row = {static_cast<double>(t)};
    for (std::size_t value : state_decode(states[t], alphabets))
      row.push_back(static_cast<double>(value));
    rows.push_back(std::move(row));
  }
  write_trajectory_csv(out, columns, rows, footer);
}

namespace {

InitialCondition parse_initial_inline(const std::string& text) {
  InitialCondition init;
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("empty initial condition");

  if (std::all_of(t.begin(), t.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    init.kind = InitialCondition::Kind::state;
    init.state = std::strtoull(t.c_str(), nullptr, 10);
    if (init.state == 0) throw ParseError("state index must be at least 1");
    return init;
  }

  if (t.find(';') != std::string::npos) {
    init.kind = InitialCondition::Kind::factors;
    for (const auto& block : split(t, ';')) {
      std::vector<double> factor;
      for (const auto& tok : split(block, ',')) factor.push_back(parse_number(tok));
      init.factors.push_back(std::move(factor));
    }
    return init;
  }

  init.kind = InitialCondition::Kind::joint;
  for (const auto& tok : split(t, ',')) init.joint.push_back(parse_number(tok));
  return init;
}

}  // namespace

InitialCondition parse_initial(const std::string& arg) {
  const std::string t = trim(arg);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(t, ec)) return parse_initial_inline(t);

  std::ifstream in(t, std::ios::binary);
  if (!in) throw ParseError("cannot read initial condition file '" + t + "'");
  std::vector<std::string> lines;
  std::string line;
  bool trajectory = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (lines.empty() && body.rfind("t,", 0) == 0) trajectory = true;
    lines.push_back(body);
  }
  if (lines.empty()) throw ParseError("initial condition file '" + t + "' has no data");

  if (trajectory) {
    if (lines.front().rfind("t,x", 0) == 0)
      throw ParseError("cannot resume from a state trajectory; pass an integer state instead");
    std::ifstream again(t, std::ios::binary);
    const TrajectoryFile f = read_trajectory_csv(again);
    if (f.rows.empty()) throw ParseError("trajectory file '" + t + "' has no rows");
    InitialCondition init;
    init.kind = InitialCondition::Kind::joint;
    init.joint.assign(f.rows.back().begin() + 1, f.rows.back().end());
    return init;
  }

  std::string joined;
  for (const auto& l : lines) {
    if (!joined.empty()) joined += ';';
    joined += l;
  }
  if (lines.size() == 1) return parse_initial_inline(lines.front());
  return parse_initial_inline(joined);
}

}  // namespace stplogic

#include "physarum/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "physarum/error.hpp"

namespace physarum::io {

namespace {

// Wraps nlohmann's type and key errors so callers see one failure class.
template <typename F>
auto parse_or_throw(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed ") + what + ": " + e.what());
  }
}

Matrix matrix_from_json(const json& rows, const char* name) {
  if (!rows.is_array()) throw std::runtime_error(std::string(name) + " must be an array of rows");
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.at(0).size();
  Matrix out(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    const auto& row = rows.at(i);
    if (!row.is_array()) throw std::runtime_error(std::string(name) + " must be an array of rows");
    if (row.size() != c) throw Error(ErrorCode::DimensionMismatch, std::string(name) + " is ragged");
    for (std::size_t j = 0; j < c; ++j) out(i, j) = row.at(j).get<double>();
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(json(Vector(r.begin(), r.end())));
  }
  return rows;
}

}  // namespace

StandardFormLP lp_from_json(const json& j) {
  return parse_or_throw("LP", [&] {
    StandardFormLP lp;
    lp.a = matrix_from_json(j.at("A"), "A");
    lp.b = j.at("b").get<Vector>();
    lp.c = j.at("c").get<Vector>();
    if (j.contains("names")) lp.names = j.at("names").get<std::vector<std::string>>();
    return lp;
  });
}

json to_json(const StandardFormLP& lp) {
  json j{{"A", matrix_to_json(lp.a)}, {"b", lp.b}, {"c", lp.c}};
  if (!lp.names.empty()) j["names"] = lp.names;
  return j;
}

json to_json(const SolveResult& r) {
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iter", t.iter},
                     {"objective", t.objective},
                     {"residual", t.residual},
                     {"linsolve_iters", t.linsolve_iters},
                     {"min_x", t.min_x}});
  }
  return {{"x", r.x},
          {"objective", r.objective},
          {"residual", r.residual},
          {"status", std::string(to_string(r.status))},
          {"trace", trace}};
}

MatchingInstance matching_from_json(const json& j) {
  return parse_or_throw("matching instance", [&] {
    MatchingInstance inst;
    inst.cost = matrix_from_json(j.at("C"), "C");
    if (j.contains("gamma") && !j.at("gamma").is_null()) inst.gamma_slack = j.at("gamma").get<double>();
    return inst;
  });
}

json to_json(const MatchingInstance& inst) {
  json j{{"C", matrix_to_json(inst.cost)}};
  if (inst.gamma_slack) j["gamma"] = *inst.gamma_slack;
  return j;
}

SvmInstance svm_from_json(const json& j) {
  return parse_or_throw("SVM instance", [&] {
    SvmInstance inst;
    inst.points = j.at("points").get<std::vector<Vector>>();
    inst.labels = j.at("labels").get<std::vector<int>>();
    if (j.contains("kernel")) {
      const auto& k = j.at("kernel");
      const auto type = k.at("type").get<std::string>();
      if (type == "linear") {
        inst.kernel.type = KernelType::Linear;
      } else if (type == "gaussian") {
        inst.kernel.type = KernelType::Gaussian;
      } else {
        throw std::runtime_error("unknown kernel type '" + type + "'");
      }
      if (k.contains("sigma")) inst.kernel.sigma = k.at("sigma").get<double>();
    }
    if (j.contains("C")) inst.c_reg = j.at("C").get<double>();
    if (j.contains("M")) inst.big_m = j.at("M").get<double>();
    if (j.contains("gamma") && !j.at("gamma").is_null()) inst.gamma = j.at("gamma").get<double>();
    return inst;
  });
}

json to_json(const SvmInstance& inst) {
  json kernel{{"type", inst.kernel.type == KernelType::Linear ? "linear" : "gaussian"}};
  if (inst.kernel.type == KernelType::Gaussian) kernel["sigma"] = inst.kernel.sigma;
  json j{{"points", inst.points},
         {"labels", inst.labels},
         {"kernel", kernel},
         {"C", inst.c_reg},
         {"M", inst.big_m}};
  if (inst.gamma) j["gamma"] = *inst.gamma;
  return j;
}

Graph graph_from_json(const json& j) {
  return parse_or_throw("graph", [&] {
    Graph g;
    g.num_nodes = j.at("nodes").get<int>();
    for (const auto& arc : j.at("arcs")) {
      if (!arc.is_array() || arc.size() != 3) {
        throw std::runtime_error("each arc must be [tail, head, weight]");
      }
      g.arcs.push_back({arc.at(0).get<int>(), arc.at(1).get<int>(), arc.at(2).get<double>()});
    }
    return g;
  });
}

json to_json(const Graph& g) {
  json arcs = json::array();
  for (const Arc& a : g.arcs) arcs.push_back(json::array({a.tail, a.head, a.weight}));
  return {{"nodes", g.num_nodes}, {"arcs", arcs}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace physarum::io

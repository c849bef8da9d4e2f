#include "axbnet/problem_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "axbnet/errors.hpp"

namespace axbnet {

namespace {

using nlohmann::json;

Mat matrix_from_json(const json& node, const std::string& where) {
  if (!node.is_array() || node.empty()) {
    throw ParseError(where + ": expected a non-empty array of rows");
  }
  const size_t rows = node.size();
  size_t cols = 0;
  for (size_t i = 0; i < rows; ++i) {
    const json& row = node[i];
    if (!row.is_array() || row.empty()) {
      throw ParseError(where + ": row " + std::to_string(i) + " is not a non-empty array");
    }
    if (i == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw ParseError(where + ": row " + std::to_string(i) + " has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(cols));
    }
    for (size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number()) {
        throw ParseError(where + ": entry (" + std::to_string(i) + "," + std::to_string(j) +
                         ") is not a number");
      }
    }
  }
  Mat m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = node[i][j].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Partition partition_from_json(const json& node, const std::string& where) {
  if (!node.is_array() || node.empty()) {
    throw ParseError(where + ": expected a non-empty array of positive integers");
  }
  std::vector<Index> sizes;
  sizes.reserve(node.size());
  for (size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number_integer() || node[i].get<long long>() < 1) {
      throw ParseError(where + ": entry " + std::to_string(i) + " is not a positive integer");
    }
    sizes.push_back(static_cast<Index>(node[i].get<long long>()));
  }
  return Partition(std::move(sizes));
}

Network graph_from_json(const json& node) {
  if (!node.is_object()) throw ParseError("graph: expected an object");
  if (node.contains("weights")) {
    Network g = make_graph(matrix_from_json(node.at("weights"), "graph.weights"));
    if (node.contains("n")) {
      if (!node.at("n").is_number_integer() || node.at("n").get<long long>() != g.n) {
        throw ParseError("graph.n: does not match the weight matrix size");
      }
    }
    return g;
  }
  if (!node.contains("kind") || !node.at("kind").is_string()) {
    throw ParseError("graph.kind: expected a string");
  }
  if (!node.contains("n") || !node.at("n").is_number_integer()) {
    throw ParseError("graph.n: expected an integer");
  }
  GraphKind kind;
  try {
    kind = graph_kind_from_string(node.at("kind").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("graph.kind: ") + e.what());
  }
  return make_graph(kind, static_cast<int>(node.at("n").get<long long>()));
}

}  // namespace

LoadedProblem parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("problem file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("problem file: expected a JSON object");

  for (const char* key : {"A", "B", "F", "structure", "partitions", "graph"}) {
    if (!doc.contains(key)) {
      throw ParseError(std::string("problem file: missing key \"") + key + "\"");
    }
  }

  LoadedProblem out;
  out.problem.A = matrix_from_json(doc.at("A"), "A");
  out.problem.B = matrix_from_json(doc.at("B"), "B");
  out.problem.F = matrix_from_json(doc.at("F"), "F");

  if (!doc.at("structure").is_string()) throw ParseError("structure: expected a string");
  try {
    out.problem.structure = structure_from_string(doc.at("structure").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("structure: ") + e.what());
  }

  const json& parts = doc.at("partitions");
  if (!parts.is_object()) throw ParseError("partitions: expected an object");
  for (auto it = parts.begin(); it != parts.end(); ++it) {
    const std::string& key = it.key();
    if (key != "m" && key != "r" && key != "p" && key != "q") {
      throw ParseError("partitions: unknown key \"" + key + "\"");
    }
  }
  if (parts.contains("m")) out.problem.part_m = partition_from_json(parts.at("m"), "partitions.m");
  if (parts.contains("r")) out.problem.part_r = partition_from_json(parts.at("r"), "partitions.r");
  if (parts.contains("p")) out.problem.part_p = partition_from_json(parts.at("p"), "partitions.p");
  if (parts.contains("q")) out.problem.part_q = partition_from_json(parts.at("q"), "partitions.q");

  out.graph = graph_from_json(doc.at("graph"));

  validate(out.problem);  // shapes, finiteness, partition presence and sums
  if (out.graph.n != block_count(out.problem)) {
    throw ParseError("graph.n: expected " + std::to_string(block_count(out.problem)) +
                     " agents to match the partitions, got " + std::to_string(out.graph.n));
  }
  return out;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

LoadedProblem load_problem(const std::string& path) { return parse_problem(read_file(path)); }

Mat parse_matrix_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("matrix file is not valid JSON: ") + e.what());
  }
  if (doc.is_array()) return matrix_from_json(doc, "matrix");
  if (doc.is_object()) {
    for (const char* key : {"X", "x"}) {
      if (doc.contains(key)) return matrix_from_json(doc.at(key), key);
    }
    throw ParseError("matrix file: object carries neither \"X\" nor \"x\"");
  }
  throw ParseError("matrix file: expected an array of rows or an object with \"X\"");
}

Mat load_matrix(const std::string& path) { return parse_matrix_text(read_file(path)); }

std::string problem_to_json(const ProblemInstance& p, const Network& g) {
  json doc;
  doc["A"] = matrix_to_json(p.A);
  doc["B"] = matrix_to_json(p.B);
  doc["F"] = matrix_to_json(p.F);
  doc["structure"] = to_string(p.structure);
  json parts = json::object();
  auto put = [&parts](const char* key, const Partition& part) {
    if (part.empty()) return;
    json arr = json::array();
    for (Index s : part.sizes()) arr.push_back(s);
    parts[key] = std::move(arr);
  };
  put("m", p.part_m);
  put("r", p.part_r);
  put("p", p.part_p);
  put("q", p.part_q);
  doc["partitions"] = std::move(parts);
  json graph = json::object();
  graph["kind"] = "custom";
  graph["n"] = g.n;
  graph["weights"] = matrix_to_json(g.weights);
  doc["graph"] = std::move(graph);
  return doc.dump(2);
}

}  // namespace axbnet

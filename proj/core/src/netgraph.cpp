#include "axbnet/netgraph.hpp"

#include <stdexcept>
#include <vector>

namespace axbnet {

Network make_graph(GraphKind kind, int n) {
  if (n < 1) throw std::invalid_argument("make_graph: need at least one agent");
  if (kind == GraphKind::custom)
    throw std::invalid_argument("make_graph: custom topology requires an explicit weight matrix");
  Mat w = Mat::Zero(n, n);
  auto link = [&w](int i, int j) {
    if (i == j) return;
    w(i, j) = 1.0;
    w(j, i) = 1.0;
  };
  switch (kind) {
    case GraphKind::cycle:
      for (int i = 0; i < n; ++i) link(i, (i + 1) % n);
      break;
    case GraphKind::path:
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
      break;
    case GraphKind::complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) link(i, j);
      break;
    case GraphKind::star:
      for (int i = 1; i < n; ++i) link(0, i);
      break;
    case GraphKind::custom:
      break;
  }
  return Network{n, std::move(w)};
}

Network make_graph(const Mat& weights) {
  Network g{static_cast<int>(weights.rows()), weights};
  validate(g);
  return g;
}

void validate(const Network& g) {
  if (g.n < 1) throw std::invalid_argument("Network: need at least one agent");
  if (g.weights.rows() != g.n || g.weights.cols() != g.n)
    throw std::invalid_argument("Network: weight matrix must be n x n");
  if (!g.weights.allFinite())
    throw std::invalid_argument("Network: weights must be finite");
  for (int i = 0; i < g.n; ++i) {
    if (g.weights(i, i) != 0.0)
      throw std::invalid_argument("Network: diagonal weights must be zero");
    for (int j = 0; j < g.n; ++j) {
      if (g.weights(i, j) < 0.0)
        throw std::invalid_argument("Network: weights must be nonnegative");
      if (g.weights(i, j) != g.weights(j, i))
        throw std::invalid_argument("Network: weights must be symmetric");
    }
  }
}

Mat laplacian(const Network& g) {
  Mat lap = -g.weights;
  for (int i = 0; i < g.n; ++i) lap(i, i) = g.weights.row(i).sum();
  return lap;
}

bool is_connected(const Network& g) {
  if (g.n <= 1) return true;
  std::vector<char> seen(static_cast<size_t>(g.n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < g.n; ++j) {
      if (!seen[static_cast<size_t>(j)] && g.weights(i, j) > 0.0) {
        seen[static_cast<size_t>(j)] = 1;
        ++visited;
        stack.push_back(j);
      }
    }
  }
  return visited == g.n;
}

GraphKind graph_kind_from_string(std::string_view s) {
  if (s == "cycle") return GraphKind::cycle;
  if (s == "path") return GraphKind::path;
  if (s == "complete") return GraphKind::complete;
  if (s == "star") return GraphKind::star;
  if (s == "custom") return GraphKind::custom;
  throw std::invalid_argument("unknown graph kind: " + std::string(s));
}

std::string to_string(GraphKind k) {
  switch (k) {
    case GraphKind::cycle: return "cycle";
    case GraphKind::path: return "path";
    case GraphKind::complete: return "complete";
    case GraphKind::star: return "star";
    case GraphKind::custom: return "custom";
  }
  return "?";
}

}  // namespace axbnet

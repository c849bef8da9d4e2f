#pragma once

#include <string>
#include <string_view>

#include "axbnet/matcore.hpp"

namespace axbnet {

enum class GraphKind { cycle, path, complete, star, custom };

/// Undirected weighted communication graph on n agents.
/// weights is n x n, symmetric, nonnegative, with zero diagonal;
/// weights(i,j) > 0 means i and j are neighbors.
struct Network {
  int n = 0;
  Mat weights;
};

/// Builds one of the named topologies with unit edge weights.
Network make_graph(GraphKind kind, int n);

/// Builds a custom graph from an explicit weight matrix.
/// Rejects asymmetric, negative, or nonzero-diagonal weights.
Network make_graph(const Mat& weights);

/// Throws std::invalid_argument if g violates the Network invariants.
void validate(const Network& g);

/// Graph Laplacian: degree matrix minus weights. Symmetric with zero row sums.
Mat laplacian(const Network& g);

/// True iff the graph is connected, decided by traversal over
/// positive-weight edges (no spectral tolerance involved).
bool is_connected(const Network& g);

GraphKind graph_kind_from_string(std::string_view s);
std::string to_string(GraphKind k);

}  // namespace axbnet

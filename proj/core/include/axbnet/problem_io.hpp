#pragma once

#include <string>

#include "axbnet/matcore.hpp"
#include "axbnet/netgraph.hpp"
#include "axbnet/problem.hpp"

namespace axbnet {

struct LoadedProblem {
  ProblemInstance problem;
  Network graph;
};

/// Parses a problem document:
/// {"A": [[..]], "B": [[..]], "F": [[..]], "structure": "RCC|RRR|...",
///  "partitions": {"m": [..], "r": [..], "p": [..], "q": [..]},
///  "graph": {"kind": "cycle|path|complete|star|custom", "n": int,
///            "weights": [[..]] optional}}
/// Only the partition keys the structure calls for may appear. Throws
/// ParseError naming the offending field; shape/consistency violations
/// surface as std::invalid_argument from validation.
LoadedProblem parse_problem(const std::string& text);

/// parse_problem on a file's contents. Throws ParseError if unreadable.
LoadedProblem load_problem(const std::string& path);

/// Reads a matrix from JSON: either a bare [[..]] array, or an object
/// carrying it under "X" or "x" (so solver reports can be fed back in).
Mat parse_matrix_text(const std::string& text);
Mat load_matrix(const std::string& path);

/// Serializes an instance + graph back into the document format above.
std::string problem_to_json(const ProblemInstance& p, const Network& g);

}  // namespace axbnet

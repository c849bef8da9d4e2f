#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "axbnet/matcore.hpp"
#include "axbnet/netgraph.hpp"

namespace axbnet {

/// Which blocks of A, B, F each agent holds. First letter is A's split,
/// second B's, third F's; R = row blocks, C = column blocks.
/// RCR, CCC, RRC, CRC reduce to the four canonical structures by transposing
/// the equation (AXB = F becomes B'X'A' = F' with primes denoting transposes).
enum class Structure { RCC, RRR, CCR, CRR, RCR, CCC, RRC, CRC };

bool is_canonical(Structure s);

/// The canonical structure an instance is solved under. Identity for the
/// four canonical tags; the transpose partner otherwise.
Structure canonical_of(Structure s);

Structure structure_from_string(std::string_view s);
std::string to_string(Structure s);

/// The matrix equation A X B = F with its information structure.
/// A is m x r, B is p x q, F is m x q, so X is r x p.
/// Only the partitions the structure needs are non-empty:
///   RCC: m, q     RRR: m, p     CCR: r, q, m   CRR: r, p, m
///   RCR: m, q     CCC: r, q     RRC: m, p, q   CRC: r, p, q
struct ProblemInstance {
  Mat A, B, F;
  Structure structure = Structure::RCC;
  Partition part_m, part_r, part_p, part_q;
};

/// Number of agent blocks (the common count of all present partitions).
int block_count(const ProblemInstance& p);

/// Throws std::invalid_argument on shape mismatch, non-finite entries,
/// missing/extra partitions, or partition sums that disagree with A/B/F.
void validate(const ProblemInstance& p);

/// The local blocks agent i holds. Meaning depends on the structure:
///   RCC: a = A row-block i,  b = B col-block i, f = F col-block i
///   RRR: a = A row-block i,  b = B row-block i, f = F row-block i
///   CCR: a = A col-block i,  b = B col-block i, f = F row-block i
///   CRR: a = A col-block i,  b = B row-block i, f = F row-block i
/// (transpose structures analogous, per their letters)
struct AgentView {
  Mat a, b, f;
};

/// Splits the instance into per-agent views. Requires g.n == block_count(p).
std::vector<AgentView> partition_views(const ProblemInstance& p, const Network& g);

/// Rewrites a transpose-reducible instance as its canonical partner:
/// A' = B^T, B' = A^T, F' = F^T with partitions remapped. Solving the result
/// and transposing X solves the original. Errors on canonical input.
ProblemInstance to_canonical(const ProblemInstance& p);

enum class Solvability { exact, least_squares_only };

/// Exact iff the columns of F lie in the column space of A and the rows of F
/// lie in the row space of B. Ranks via SVD with relative tolerance
/// max(dim) * machine epsilon.
Solvability solvability(const ProblemInstance& p);

std::string to_string(Solvability s);

}  // namespace axbnet

// Copyright 2026 The kuramoto-graphs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KURAMOTO_GRAPH_HPP_
#define KURAMOTO_GRAPH_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace kuramoto {

using Eigen::Index;

/*
 * Weighted (multi)graph on vertices 0..n-1 in compressed sparse row form.
 *
 * Entry (i, j) holds the multiplicity xi_ij >= 1 of the edge i -> j. The
 * dilution p_n in (0, 1] normalises the interaction: the normalised degree
 * of i is (1 / (n p_n)) sum_j xi_ij. When `symmetric` is set the adjacency
 * is checked to equal its transpose.
 */
class SparseGraph {
public:
  using Adjacency = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
  using Triplet = Eigen::Triplet<double, int>;

  SparseGraph(Adjacency adjacency, double dilution, bool symmetric);

  static SparseGraph from_triplets(Index n, const std::vector<Triplet> &triplets,
                                   double dilution, bool symmetric);

  Index size() const { return adjacency_.rows(); }
  double dilution() const { return dilution_; }
  bool symmetric() const { return symmetric_; }
  Index edge_count() const { return adjacency_.nonZeros(); }
  const Adjacency &adjacency() const { return adjacency_; }

  std::span<const int> row_offsets() const {
    return {adjacency_.outerIndexPtr(), static_cast<std::size_t>(size() + 1)};
  }
  std::span<const int> col_indices() const {
    return {adjacency_.innerIndexPtr(), static_cast<std::size_t>(edge_count())};
  }
  std::span<const double> edge_weights() const {
    return {adjacency_.valuePtr(), static_cast<std::size_t>(edge_count())};
  }

  /// True for the complete simple graph with dilution one, which admits
  /// an O(n) interaction kernel.
  bool is_complete() const { return complete_; }

  /// Degree d when every vertex has exactly d unit-weight neighbours and no
  /// self loop; -1 otherwise.
  Index regular_degree() const;

  bool operator==(const SparseGraph &other) const;

private:
  Adjacency adjacency_;
  double dilution_;
  bool symmetric_;
  bool complete_ = false;
};

SparseGraph gen_complete(Index n);

/// Each off-diagonal ordered pair (or unordered pair if `symmetric`) is an
/// edge independently with probability p. Deterministic in all arguments.
SparseGraph gen_erdos_renyi(Index n, double p, std::uint64_t seed, bool symmetric);

/// Simple undirected d-regular graph from the pairing model. Stubs are
/// matched one pair at a time, rejecting a pair that would create a loop or
/// a repeated edge; a full restart happens only when no valid pair remains.
/// Gives up after 10^4 restarts.
SparseGraph gen_random_regular(Index n, Index d, std::uint64_t seed);

/// Two disjoint Erdos-Renyi blocks on vertices [0, n/2) and [n/2, n) with
/// intra-block edge probability p. The dilution is set to p / 2 so that
/// normalised degrees stay close to one.
SparseGraph gen_disjoint_er(Index n, double p, std::uint64_t seed, bool symmetric);

struct GraphAudit {
  Eigen::VectorXd normalized_degrees;
  double delta = 0.0;
  double bad_fraction = 0.0;
  double giant_fraction = 0.0;
  Index component_count = 0;
  /// Component label per vertex, labels ordered by first appearance.
  std::vector<Index> component_of;
};

GraphAudit audit(const SparseGraph &graph, double delta);

/// ||xi / p - 1||_{inf->1} by exhaustive search over sign vectors; n <= 22.
double deviation_norm_exact(const SparseGraph &graph);

inline constexpr Index kExactNormMaxVertices = 22;

/// Alternating sign maximisation from `restarts` random starts. Always a
/// lower bound of deviation_norm_exact.
double deviation_norm_heuristic(const SparseGraph &graph, int restarts, std::uint64_t seed);

/// (M s)_i for M = xi / p - 1, applied without forming M.
Eigen::VectorXd deviation_apply(const SparseGraph &graph, const Eigen::VectorXd &signs);
/// (M^T t)_j.
Eigen::VectorXd deviation_apply_transpose(const SparseGraph &graph, const Eigen::VectorXd &signs);

/// 2 / sqrt(n p): high-probability upper bound on (1/n^2) ||xi/p - 1|| for
/// Erdos-Renyi graphs.
double bernstein_bound(Index n, double p);

enum class EigenMethod { kAuto, kDense, kPowerIteration };

/// Second largest |eigenvalue| of the adjacency of a symmetric d-regular
/// graph (the top eigenvalue d belongs to the constant vector).
double second_eigenvalue(const SparseGraph &graph, EigenMethod method = EigenMethod::kAuto);

inline constexpr Index kDenseEigenMaxVertices = 2000;

/// 4 lambda / d, the expander-mixing upper bound on the normalised deviation
/// norm of a d-regular graph.
double mixing_bound(const SparseGraph &graph, EigenMethod method = EigenMethod::kAuto);

// Edge list text format. First line `n m p_n sym`, then m lines `i j w`.
// Symmetric graphs list each unordered pair once with i < j.
void write_edge_list(std::ostream &os, const SparseGraph &graph);
SparseGraph read_edge_list(std::istream &is);

} // namespace kuramoto

#endif // KURAMOTO_GRAPH_HPP_

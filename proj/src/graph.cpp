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

#include "kuramoto/graph.hpp"
#include "kuramoto/rng_audit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace kuramoto {

namespace {

bool is_multiplicity(double w) { return w >= 1.0 && w == std::floor(w); }

class DisjointSets {
public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent_[std::max(a, b)] = std::min(a, b);
    }
  }

private:
  std::vector<Index> parent_;
};

// Visits the positions of successes in a Bernoulli(p) sequence of the given
// length, skipping geometrically distributed runs of failures.
template <typename Visit>
void bernoulli_positions(std::mt19937_64 &rng, double p, long long length, Visit &&visit) {
  std::geometric_distribution<long long> gap(p);
  for (long long pos = gap(rng); pos < length; pos += 1 + gap(rng)) {
    visit(pos);
  }
}

void append_er_block(std::vector<SparseGraph::Triplet> &triplets, Index offset, Index size,
                     double p, std::mt19937_64 &rng, bool symmetric) {
  if (size < 2) {
    return;
  }
  if (symmetric) {
    // Unordered pairs i < j enumerated row by row.
    const long long total = static_cast<long long>(size) * (size - 1) / 2;
    Index row = 0;
    long long row_start = 0;
    bernoulli_positions(rng, p, total, [&](long long pos) {
      while (pos >= row_start + (size - 1 - row)) {
        row_start += size - 1 - row;
        ++row;
      }
      const Index col = row + 1 + static_cast<Index>(pos - row_start);
      triplets.emplace_back(int(offset + row), int(offset + col), 1.0);
      triplets.emplace_back(int(offset + col), int(offset + row), 1.0);
    });
  } else {
    const long long total = static_cast<long long>(size) * (size - 1);
    bernoulli_positions(rng, p, total, [&](long long pos) {
      const Index row = static_cast<Index>(pos / (size - 1));
      Index col = static_cast<Index>(pos % (size - 1));
      if (col >= row) {
        ++col;
      }
      triplets.emplace_back(int(offset + row), int(offset + col), 1.0);
    });
  }
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

double abs_sum(const Eigen::VectorXd &v) {
  double sum = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    sum += std::abs(v(i));
  }
  return sum;
}

} // namespace

SparseGraph::SparseGraph(Adjacency adjacency, double dilution, bool symmetric)
    : adjacency_(std::move(adjacency)), dilution_(dilution), symmetric_(symmetric) {
  if (adjacency_.rows() != adjacency_.cols()) {
    throw std::invalid_argument("SparseGraph: adjacency must be square");
  }
  if (!(dilution_ > 0.0 && dilution_ <= 1.0)) {
    throw std::invalid_argument("SparseGraph: dilution must lie in (0, 1]");
  }
  adjacency_.makeCompressed();
  bool self_loop = false;
  bool unit_weights = true;
  for (Index i = 0; i < adjacency_.outerSize(); ++i) {
    for (Adjacency::InnerIterator it(adjacency_, i); it; ++it) {
      if (!is_multiplicity(it.value())) {
        throw std::invalid_argument("SparseGraph: edge weights must be positive integers");
      }
      self_loop = self_loop || it.col() == i;
      unit_weights = unit_weights && it.value() == 1.0;
    }
  }
  if (symmetric_) {
    const Adjacency transposed = adjacency_.transpose();
    if ((adjacency_ - transposed).squaredNorm() != 0.0) {
      throw std::invalid_argument("SparseGraph: adjacency flagged symmetric but xi != xi^T");
    }
  }
  const Index n = size();
  complete_ = !self_loop && unit_weights && dilution_ == 1.0 && edge_count() == n * (n - 1);
}

SparseGraph SparseGraph::from_triplets(Index n, const std::vector<Triplet> &triplets,
                                       double dilution, bool symmetric) {
  Adjacency adjacency(n, n);
  adjacency.setFromTriplets(triplets.begin(), triplets.end());
  return SparseGraph(std::move(adjacency), dilution, symmetric);
}

Index SparseGraph::regular_degree() const {
  if (size() == 0) {
    return -1;
  }
  Index degree = -1;
  for (Index i = 0; i < size(); ++i) {
    Index count = 0;
    for (Adjacency::InnerIterator it(adjacency_, i); it; ++it) {
      if (it.col() == i || it.value() != 1.0) {
        return -1;
      }
      ++count;
    }
    if (degree >= 0 && count != degree) {
      return -1;
    }
    degree = count;
  }
  return degree;
}

bool SparseGraph::operator==(const SparseGraph &other) const {
  return size() == other.size() && dilution_ == other.dilution_ &&
         symmetric_ == other.symmetric_ && edge_count() == other.edge_count() &&
         std::equal(row_offsets().begin(), row_offsets().end(), other.row_offsets().begin()) &&
         std::equal(col_indices().begin(), col_indices().end(), other.col_indices().begin()) &&
         std::equal(edge_weights().begin(), edge_weights().end(), other.edge_weights().begin());
}

SparseGraph gen_complete(Index n) {
  if (n < 1) {
    throw std::invalid_argument("gen_complete: n must be >= 1");
  }
  std::vector<SparseGraph::Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(n * (n - 1)));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) {
        triplets.emplace_back(int(i), int(j), 1.0);
      }
    }
  }
  return SparseGraph::from_triplets(n, triplets, 1.0, true);
}

SparseGraph gen_erdos_renyi(Index n, double p, std::uint64_t seed, bool symmetric) {
  if (n < 2) {
    throw std::invalid_argument("gen_erdos_renyi: n must be >= 2");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("gen_erdos_renyi: p must lie in (0, 1]");
  }
  rng_audit::note(seed);
  std::mt19937_64 rng(seed);
  std::vector<SparseGraph::Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(p * double(n) * double(n - 1) * 1.1) + 16);
  append_er_block(triplets, 0, n, p, rng, symmetric);
  return SparseGraph::from_triplets(n, triplets, p, symmetric);
}

SparseGraph gen_disjoint_er(Index n, double p, std::uint64_t seed, bool symmetric) {
  if (n < 4) {
    throw std::invalid_argument("gen_disjoint_er: n must be >= 4");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("gen_disjoint_er: p must lie in (0, 1]");
  }
  rng_audit::note(seed);
  std::mt19937_64 rng(seed);
  std::vector<SparseGraph::Triplet> triplets;
  const Index half = n / 2;
  append_er_block(triplets, 0, half, p, rng, symmetric);
  append_er_block(triplets, half, n - half, p, rng, symmetric);
  return SparseGraph::from_triplets(n, triplets, p / 2.0, symmetric);
}

SparseGraph gen_random_regular(Index n, Index d, std::uint64_t seed) {
  if (d < 0 || d >= n || (n * d) % 2 != 0) {
    throw std::invalid_argument("gen_random_regular: need 0 <= d < n and n*d even (n=" +
                                std::to_string(n) + ", d=" + std::to_string(d) + ")");
  }
  constexpr int kMaxRestarts = 10000;
  constexpr int kFailuresBeforeCheck = 100;
  rng_audit::note(seed);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(n));
  std::vector<int> stubs;

  const auto adjacent = [&](int u, int v) {
    const auto &nu = neighbours[u];
    return std::find(nu.begin(), nu.end(), v) != nu.end();
  };
  // True if some pair of remaining stubs could still be joined.
  const auto has_valid_pair = [&]() {
    std::vector<int> vertices(stubs.begin(), stubs.end());
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    for (std::size_t a = 0; a < vertices.size(); ++a) {
      for (std::size_t b = a + 1; b < vertices.size(); ++b) {
        if (!adjacent(vertices[a], vertices[b])) {
          return true;
        }
      }
    }
    return false;
  };

  for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
    for (auto &nu : neighbours) {
      nu.clear();
    }
    stubs.resize(static_cast<std::size_t>(n * d));
    for (Index k = 0; k < n * d; ++k) {
      stubs[k] = static_cast<int>(k / d);
    }
    int failures = 0;
    bool stuck = false;
    while (!stubs.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, stubs.size() - 1);
      std::size_t a = pick(rng);
      std::size_t b = pick(rng);
      const int u = stubs[a];
      const int v = stubs[b];
      if (a == b || u == v || adjacent(u, v)) {
        if (++failures >= kFailuresBeforeCheck) {
          if (!has_valid_pair()) {
            stuck = true;
            break;
          }
          failures = 0;
        }
        continue;
      }
      failures = 0;
      neighbours[u].push_back(v);
      neighbours[v].push_back(u);
      if (a < b) {
        std::swap(a, b);
      }
      stubs[a] = stubs.back();
      stubs.pop_back();
      stubs[b] = stubs.back();
      stubs.pop_back();
    }
    if (stuck) {
      continue;
    }
    std::vector<SparseGraph::Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(n * d));
    for (Index u = 0; u < n; ++u) {
      for (int v : neighbours[u]) {
        triplets.emplace_back(int(u), v, 1.0);
      }
    }
    const double dilution = d == 0 ? 1.0 : double(d) / double(n);
    return SparseGraph::from_triplets(n, triplets, dilution, true);
  }
  throw std::runtime_error("gen_random_regular: no simple graph after " +
                           std::to_string(kMaxRestarts) + " restarts");
}

GraphAudit audit(const SparseGraph &graph, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("audit: delta must be positive");
  }
  const Index n = graph.size();
  const auto &adj = graph.adjacency();
  GraphAudit out;
  out.delta = delta;
  out.normalized_degrees =
      (adj * Eigen::VectorXd::Ones(n)) / (double(n) * graph.dilution());
  Index bad = 0;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(out.normalized_degrees(i) - 1.0) >= delta) {
      ++bad;
    }
  }
  out.bad_fraction = n == 0 ? 0.0 : double(bad) / double(n);

  DisjointSets sets(n);
  for (Index i = 0; i < adj.outerSize(); ++i) {
    for (SparseGraph::Adjacency::InnerIterator it(adj, i); it; ++it) {
      sets.unite(i, it.col());
    }
  }
  std::vector<Index> label_of_root(static_cast<std::size_t>(n), -1);
  std::vector<Index> sizes;
  out.component_of.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index root = sets.find(i);
    if (label_of_root[root] < 0) {
      label_of_root[root] = Index(sizes.size());
      sizes.push_back(0);
    }
    out.component_of[i] = label_of_root[root];
    ++sizes[label_of_root[root]];
  }
  out.component_count = Index(sizes.size());
  out.giant_fraction =
      n == 0 ? 0.0 : double(*std::max_element(sizes.begin(), sizes.end())) / double(n);
  return out;
}

Eigen::VectorXd deviation_apply(const SparseGraph &graph, const Eigen::VectorXd &signs) {
  const Eigen::VectorXd product = graph.adjacency() * signs;
  const double total = signs.sum();
  return (product.array() / graph.dilution() - total).matrix();
}

Eigen::VectorXd deviation_apply_transpose(const SparseGraph &graph,
                                          const Eigen::VectorXd &signs) {
  const Eigen::VectorXd product = graph.adjacency().transpose() * signs;
  const double total = signs.sum();
  return (product.array() / graph.dilution() - total).matrix();
}

double deviation_norm_exact(const SparseGraph &graph) {
  const Index n = graph.size();
  if (n > kExactNormMaxVertices) {
    throw std::invalid_argument("deviation_norm_exact: n = " + std::to_string(n) +
                                " exceeds the exhaustive-search cap of " +
                                std::to_string(kExactNormMaxVertices) +
                                "; use the heuristic lower bound instead");
  }
  if (n == 0) {
    return 0.0;
  }
  // Column access for single-coordinate flips.
  const Eigen::SparseMatrix<double, Eigen::ColMajor, int> columns = graph.adjacency();
  const double p = graph.dilution();

  // Since f(-s) = f(s) the first coordinate is pinned to +1; the rest are
  // enumerated in Gray-code order so each step flips one sign.
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd product = columns * signs;
  double total = double(n);
  const auto value = [&]() {
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      sum += std::abs(product(i) / p - total);
    }
    return sum;
  };
  double best = value();
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t k = 1; k < count; ++k) {
    const Index flip = 1 + std::countr_zero(k);
    const double change = -2.0 * signs(flip);
    signs(flip) = -signs(flip);
    for (decltype(columns)::InnerIterator it(columns, flip); it; ++it) {
      product(it.row()) += change * it.value();
    }
    total += change;
    best = std::max(best, value());
  }
  return best;
}

double deviation_norm_heuristic(const SparseGraph &graph, int restarts, std::uint64_t seed) {
  if (restarts < 1) {
    throw std::invalid_argument("deviation_norm_heuristic: restarts must be >= 1");
  }
  constexpr int kMaxSweeps = 1000;
  const Index n = graph.size();
  if (n == 0) {
    return 0.0;
  }
  rng_audit::note(seed);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  double best = 0.0;
  for (int restart = 0; restart < restarts; ++restart) {
    Eigen::VectorXd s(n);
    for (Index i = 0; i < n; ++i) {
      s(i) = coin(rng) ? 1.0 : -1.0;
    }
    Eigen::VectorXd ms = deviation_apply(graph, s);
    double value = abs_sum(ms);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      const Eigen::VectorXd t = ms.unaryExpr(&sign_of);
      const Eigen::VectorXd next = deviation_apply_transpose(graph, t).unaryExpr(&sign_of);
      Eigen::VectorXd next_ms = deviation_apply(graph, next);
      const double next_value = abs_sum(next_ms);
      if (!(next_value > value)) {
        break;
      }
      ms = std::move(next_ms);
      value = next_value;
    }
    best = std::max(best, value);
  }
  return best;
}

double bernstein_bound(Index n, double p) {
  const double mean_degree = double(n) * p;
  if (!(mean_degree > 0.0)) {
    throw std::invalid_argument("bernstein_bound: n p must be positive");
  }
  return 2.0 / std::sqrt(mean_degree);
}

double second_eigenvalue(const SparseGraph &graph, EigenMethod method) {
  const Index n = graph.size();
  if (!graph.symmetric()) {
    throw std::invalid_argument("second_eigenvalue: graph must be symmetric");
  }
  if (n < 2) {
    throw std::invalid_argument("second_eigenvalue: need at least two vertices");
  }
  if (method == EigenMethod::kAuto) {
    method = n <= kDenseEigenMaxVertices ? EigenMethod::kDense : EigenMethod::kPowerIteration;
  }
  if (method == EigenMethod::kDense) {
    const Eigen::MatrixXd dense = graph.adjacency();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd &values = solver.eigenvalues(); // ascending
    return std::max(std::abs(values(0)), std::abs(values(n - 2)));
  }

  // Power iteration restricted to the orthogonal complement of the constant
  // vector, which is the top eigenvector of a regular graph.
  constexpr int kMaxIterations = 20000;
  // Fixed quasi-random start (Weyl sequence), so the estimate needs no seed.
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) {
    x(i) = std::sin(2.0 * std::numbers::pi * std::fmod(0.6180339887498949 * double(i + 1), 1.0) + 0.5);
  }
  x.array() -= x.mean();
  x.normalize();
  double estimate = 0.0;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Eigen::VectorXd y = graph.adjacency() * x;
    y.array() -= y.mean();
    const double next = y.norm();
    if (next == 0.0) {
      return 0.0;
    }
    x = y / next;
    if (std::abs(next - estimate) <= 1e-12 * next) {
      return next;
    }
    estimate = next;
  }
  return estimate;
}

double mixing_bound(const SparseGraph &graph, EigenMethod method) {
  const Index d = graph.regular_degree();
  if (d <= 0 || !graph.symmetric()) {
    throw std::invalid_argument("mixing_bound: graph must be symmetric and d-regular with d >= 1");
  }
  return 4.0 * second_eigenvalue(graph, method) / double(d);
}

void write_edge_list(std::ostream &os, const SparseGraph &graph) {
  const auto &adj = graph.adjacency();
  Index lines = 0;
  for (Index i = 0; i < adj.outerSize(); ++i) {
    for (SparseGraph::Adjacency::InnerIterator it(adj, i); it; ++it) {
      if (!graph.symmetric() || it.col() >= i) {
        ++lines;
      }
    }
  }
  os << graph.size() << ' ' << lines << ' ' << std::setprecision(17) << graph.dilution() << ' '
     << (graph.symmetric() ? 1 : 0) << '\n';
  for (Index i = 0; i < adj.outerSize(); ++i) {
    for (SparseGraph::Adjacency::InnerIterator it(adj, i); it; ++it) {
      if (!graph.symmetric() || it.col() >= i) {
        os << i << ' ' << it.col() << ' ' << static_cast<long long>(it.value()) << '\n';
      }
    }
  }
}

SparseGraph read_edge_list(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) {
    throw std::runtime_error("edge list: missing header line 'n m p_n sym'");
  }
  std::istringstream header(line);
  long long n = 0;
  long long m = 0;
  double p = 0.0;
  int sym = 0;
  if (!(header >> n >> m >> p >> sym) || n < 0 || m < 0 || (sym != 0 && sym != 1)) {
    throw std::runtime_error("edge list: malformed header '" + line + "'");
  }
  std::vector<SparseGraph::Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(sym ? 2 * m : m));
  for (long long e = 0; e < m; ++e) {
    long long i = 0;
    long long j = 0;
    long long w = 0;
    if (!(is >> i >> j >> w)) {
      throw std::runtime_error("edge list: expected " + std::to_string(m) + " edges, got " +
                               std::to_string(e));
    }
    if (i < 0 || j < 0 || i >= n || j >= n || w < 1) {
      throw std::runtime_error("edge list: invalid edge on line " + std::to_string(e + 2));
    }
    triplets.emplace_back(int(i), int(j), double(w));
    if (sym && i != j) {
      triplets.emplace_back(int(j), int(i), double(w));
    }
  }
  return SparseGraph::from_triplets(Index(n), triplets, p, sym == 1);
}

} // namespace kuramoto

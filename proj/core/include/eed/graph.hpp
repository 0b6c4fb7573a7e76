#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eed/embedding.hpp"

namespace eed {

struct GraphStats {
  double avg_degree = 0.0;
  double density = 0.0;
  int max_degree = 0;
  std::int64_t triangles = 0;
  int components = 0;
  double avg_shortest_path = 0.0;
};

// Immutable sparse adjacency in CSR form. Targets of each source are sorted
// and deduplicated. Undirected graphs store both orders of every edge, so
// has_edge(i, j) == has_edge(j, i) holds for them by construction.
class SparseGraph {
 public:
  SparseGraph() = default;

  static SparseGraph from_edges(int num_nodes,
                                std::vector<std::pair<int, int>> edges,
                                bool directed, bool include_self_loops);

  int num_nodes() const { return n_; }
  bool directed() const { return directed_; }
  bool include_self_loops() const { return self_loops_; }

  // Count of stored (source, target) pairs; an undirected edge counts twice.
  std::int64_t num_ordered_links() const {
    return static_cast<std::int64_t>(col_.size());
  }

  std::span<const int> neighbors(int i) const {
    return {col_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  int out_degree(int i) const {
    return static_cast<int>(row_ptr_[i + 1] - row_ptr_[i]);
  }
  bool has_edge(int i, int j) const;

 private:
  int n_ = 0;
  bool directed_ = false;
  bool self_loops_ = false;
  std::vector<std::int64_t> row_ptr_ = {0};
  std::vector<int> col_;
};

// Reads a whitespace-separated edge list (two integer tokens per line; '#'
// and '%' start comment lines). Node ids are compacted to [0, n) in sorted
// order; when original_ids is non-null it receives the original id of each
// compact index so callers can persist the mapping.
SparseGraph load_edge_list(const std::string& path, bool directed,
                           bool include_self_loops,
                           std::vector<std::int64_t>* original_ids = nullptr);

// Writes one edge per line. Undirected graphs emit each edge once (i <= j).
void write_edge_list(const SparseGraph& g, const std::string& path);

enum class BlockMode { Homophilous, Heterophilous };

// Deterministic planted-partition graph: homophilous links nodes of the same
// block, heterophilous links nodes of different blocks. Undirected, no
// self-loops. The seed is accepted for generator-interface uniformity; the
// construction does not use randomness.
SparseGraph gen_block_graph(const std::vector<int>& block_sizes,
                            BlockMode mode, std::uint64_t seed = 0);

struct GeometricGraph {
  SparseGraph graph;
  Embedding truth;  // L2 ground truth: x == y == sampled points, bias = beta
};

// Samples n points uniformly in the unit d-ball (random direction, radius
// U^(1/d)). Deterministic variant links i and j iff |p_i - p_j| <= bias;
// stochastic variant links with probability sigmoid(bias - |p_i - p_j|).
// Undirected, no self-loops.
GeometricGraph gen_geometric(int n, int d, double bias, std::uint64_t seed,
                             bool stochastic = false);

GraphStats graph_stats(const SparseGraph& g, int path_sample = 100,
                       std::uint64_t seed = 0);

}  // namespace eed

#include "eed/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "eed/rng.hpp"

namespace eed {

SparseGraph SparseGraph::from_edges(int num_nodes,
                                    std::vector<std::pair<int, int>> edges,
                                    bool directed, bool include_self_loops) {
  if (num_nodes < 0) throw std::invalid_argument("node count must be >= 0");
  for (auto [i, j] : edges) {
    if (i < 0 || i >= num_nodes || j < 0 || j >= num_nodes) {
      throw std::out_of_range("edge endpoint " + std::to_string(i) + "," +
                              std::to_string(j) + " outside [0," +
                              std::to_string(num_nodes) + ")");
    }
  }

  if (!include_self_loops) {
    std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
  }
  if (!directed) {
    const std::size_t m = edges.size();
    edges.reserve(2 * m);
    for (std::size_t k = 0; k < m; ++k) {
      edges.emplace_back(edges[k].second, edges[k].first);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  SparseGraph g;
  g.n_ = num_nodes;
  g.directed_ = directed;
  g.self_loops_ = include_self_loops;
  g.row_ptr_.assign(num_nodes + 1, 0);
  g.col_.reserve(edges.size());
  for (auto [i, j] : edges) {
    g.row_ptr_[i + 1]++;
    g.col_.push_back(j);
  }
  std::partial_sum(g.row_ptr_.begin(), g.row_ptr_.end(), g.row_ptr_.begin());
  return g;
}

bool SparseGraph::has_edge(int i, int j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

SparseGraph load_edge_list(const std::string& path, bool directed,
                           bool include_self_loops,
                           std::vector<std::int64_t>* original_ids) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#' || line[first] == '%') continue;
    std::istringstream ls(line);
    std::int64_t a, b;
    if (!(ls >> a >> b)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected two integer tokens");
    }
    std::string extra;
    if (ls >> extra) {
      // Tolerate trailing columns only if numeric (weighted exports); SNAP
      // files are strictly two-column, so anything else is a parse error.
      try {
        (void)std::stod(extra);
      } catch (...) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": unexpected token '" + extra + "'");
      }
    }
    raw.emplace_back(a, b);
  }
  if (raw.empty()) throw std::runtime_error("edge list is empty: " + path);

  std::map<std::int64_t, int> compact;
  for (auto [a, b] : raw) {
    compact.emplace(a, 0);
    compact.emplace(b, 0);
  }
  int next = 0;
  for (auto& [orig, idx] : compact) idx = next++;

  std::vector<std::pair<int, int>> edges;
  edges.reserve(raw.size());
  for (auto [a, b] : raw) edges.emplace_back(compact[a], compact[b]);

  if (original_ids) {
    original_ids->assign(next, 0);
    for (auto [orig, idx] : compact) (*original_ids)[idx] = orig;
  }
  return SparseGraph::from_edges(next, std::move(edges), directed,
                                 include_self_loops);
}

void write_edge_list(const SparseGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (int i = 0; i < g.num_nodes(); ++i) {
    for (int j : g.neighbors(i)) {
      if (!g.directed() && j < i) continue;
      out << i << ' ' << j << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SparseGraph gen_block_graph(const std::vector<int>& block_sizes,
                            BlockMode mode, std::uint64_t /*seed*/) {
  if (block_sizes.empty()) throw std::invalid_argument("no blocks given");
  for (int s : block_sizes) {
    if (s < 1) throw std::invalid_argument("block sizes must be >= 1");
  }
  const int n = std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
  std::vector<int> block_of(n);
  int node = 0, b = 0;
  for (int s : block_sizes) {
    for (int k = 0; k < s; ++k) block_of[node++] = b;
    ++b;
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool same = block_of[i] == block_of[j];
      if (same == (mode == BlockMode::Homophilous)) edges.emplace_back(i, j);
    }
  }
  return SparseGraph::from_edges(n, std::move(edges), /*directed=*/false,
                                 /*include_self_loops=*/false);
}

GeometricGraph gen_geometric(int n, int d, double bias, std::uint64_t seed,
                             bool stochastic) {
  if (n < 2) throw std::invalid_argument("need at least 2 nodes");
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (bias <= 0.0) throw std::invalid_argument("bias must be positive");

  auto rng = substream(seed, "sampling");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd dir(d);
    double norm2 = 0.0;
    do {
      for (int k = 0; k < d; ++k) dir(k) = gauss(rng);
      norm2 = dir.squaredNorm();
    } while (norm2 == 0.0);
    const double radius = std::pow(unif(rng), 1.0 / d);
    pts.row(i) = dir * (radius / std::sqrt(norm2));
  }

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dist = row_distance(pts, i, pts, j);
      bool link;
      if (stochastic) {
        const double p = 1.0 / (1.0 + std::exp(-(bias - dist)));
        link = unif(rng) < p;
      } else {
        link = dist <= bias;
      }
      if (link) edges.emplace_back(i, j);
    }
  }

  GeometricGraph out;
  out.graph = SparseGraph::from_edges(n, std::move(edges), /*directed=*/false,
                                      /*include_self_loops=*/false);
  out.truth = Embedding{pts, pts, bias, ModelKind::L2};
  return out;
}

namespace {

// Symmetrized neighbor lists, self-loops removed; shared by the triangle,
// component, and shortest-path statistics.
std::vector<std::vector<int>> undirected_view(const SparseGraph& g) {
  std::vector<std::vector<int>> adj(g.num_nodes());
  for (int i = 0; i < g.num_nodes(); ++i) {
    for (int j : g.neighbors(i)) {
      if (j == i) continue;
      adj[i].push_back(j);
      if (g.directed()) adj[j].push_back(i);
    }
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return adj;
}

}  // namespace

GraphStats graph_stats(const SparseGraph& g, int path_sample,
                       std::uint64_t seed) {
  GraphStats s;
  const int n = g.num_nodes();
  if (n == 0) return s;

  std::int64_t nonloop = 0;
  for (int i = 0; i < n; ++i) {
    for (int j : g.neighbors(i)) {
      if (j != i) ++nonloop;
    }
    s.max_degree = std::max(s.max_degree, g.out_degree(i));
  }
  s.avg_degree = static_cast<double>(g.num_ordered_links()) / n;
  s.density = n > 1 ? static_cast<double>(nonloop) / (static_cast<double>(n) *
                                                      (n - 1))
                    : 0.0;

  const auto adj = undirected_view(g);

  // Each triangle counted once at its sorted orientation i < j < k.
  for (int i = 0; i < n; ++i) {
    for (int j : adj[i]) {
      if (j <= i) continue;
      const auto& a = adj[i];
      const auto& b = adj[j];
      auto ia = std::upper_bound(a.begin(), a.end(), j);
      auto ib = std::upper_bound(b.begin(), b.end(), j);
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          ++s.triangles;
          ++ia;
          ++ib;
        }
      }
    }
  }

  std::vector<int> comp(n, -1);
  int num_comp = 0;
  std::vector<int> comp_size;
  for (int start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    int size = 0;
    std::deque<int> queue{start};
    comp[start] = num_comp;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      ++size;
      for (int v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = num_comp;
          queue.push_back(v);
        }
      }
    }
    comp_size.push_back(size);
    ++num_comp;
  }
  s.components = num_comp;

  const int giant =
      static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) -
                       comp_size.begin());
  std::vector<int> members;
  for (int i = 0; i < n; ++i) {
    if (comp[i] == giant) members.push_back(i);
  }
  if (members.size() > 1) {
    auto rng = substream(seed, "sampling");
    std::vector<int> sources = members;
    std::shuffle(sources.begin(), sources.end(), rng);
    if (static_cast<int>(sources.size()) > path_sample) {
      sources.resize(path_sample);
    }
    double total = 0.0;
    std::int64_t pairs = 0;
    std::vector<int> dist(n);
    for (int src : sources) {
      std::fill(dist.begin(), dist.end(), -1);
      dist[src] = 0;
      std::deque<int> queue{src};
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[u]) {
          if (dist[v] < 0) {
            dist[v] = dist[u] + 1;
            queue.push_back(v);
          }
        }
      }
      for (int v : members) {
        if (v != src && dist[v] > 0) {
          total += dist[v];
          ++pairs;
        }
      }
    }
    s.avg_shortest_path = pairs > 0 ? total / pairs : 0.0;
  }
  return s;
}

}  // namespace eed

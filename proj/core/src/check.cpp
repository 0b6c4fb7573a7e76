#include "eed/check.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "eed/loss.hpp"
#include "eed/optim.hpp"

namespace eed {

namespace {

void require_match(const Embedding& e, const SparseGraph& g) {
  if (e.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("embedding and graph node counts differ");
  }
}

}  // namespace

void write_active_set_csv(const ActiveSet& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "i,j,label\n";
  for (const ActiveDyad& d : s.dyads) {
    out << d.i << ',' << d.j << ',' << static_cast<int>(d.label_shifted)
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

DenseCheckResult dense_check(const Embedding& e, const SparseGraph& g,
                             int node_cap) {
  require_match(e, g);
  const int n = g.num_nodes();
  if (n > node_cap) {
    throw std::invalid_argument(
        "graph has " + std::to_string(n) + " nodes, above the dense cap of " +
        std::to_string(node_cap) + "; use kdtree_check instead");
  }

  DenseCheckResult res;
  for (int i = 0; i < n; ++i) {
    const auto nbrs = g.neighbors(i);
    std::size_t cursor = 0;
    for (int j = 0; j < n; ++j) {
      if (i == j && !g.include_self_loops()) continue;
      ++res.active.total_dyads;
      while (cursor < nbrs.size() && nbrs[cursor] < j) ++cursor;
      const bool link = cursor < nbrs.size() && nbrs[cursor] == j;
      const double label = link ? 1.0 : -1.0;
      if (label * e.logit(i, j) <= 0.0) {
        res.active.dyads.push_back({i, j, label});
      }
    }
  }

  const auto links = g.num_ordered_links();
  const auto mis = res.active.misclassified();
  if (links > 0) {
    res.frobenius_rel_error =
        std::sqrt(static_cast<double>(mis)) / std::sqrt(static_cast<double>(links));
  } else {
    res.frobenius_rel_error =
        mis > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return res;
}

KdTree::KdTree(const Eigen::MatrixXd& points, int leaf_size)
    : points_(points), leaf_size_(leaf_size) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw std::invalid_argument("kd-tree needs at least one point and one "
                                "coordinate");
  }
  if (leaf_size_ < 1) throw std::invalid_argument("leaf size must be >= 1");
  perm_.resize(points_.rows());
  std::iota(perm_.begin(), perm_.end(), 0);
  nodes_.reserve(static_cast<std::size_t>(2 * points_.rows() / leaf_size_ + 2));
  build(0, static_cast<int>(points_.rows()));
}

int KdTree::build(int begin, int end) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});

  const int count = end - begin;
  if (count <= leaf_size_) return idx;

  // Split on the coordinate with the widest spread across this range.
  const int d = static_cast<int>(points_.cols());
  int split_dim = 0;
  double best_spread = -1.0;
  for (int k = 0; k < d; ++k) {
    double lo = points_(perm_[begin], k), hi = lo;
    for (int p = begin + 1; p < end; ++p) {
      const double v = points_(perm_[p], k);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      split_dim = k;
    }
  }
  if (best_spread <= 0.0) return idx;  // all points identical: keep as a leaf

  const int mid = begin + count / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid,
                   perm_.begin() + end, [&](int a, int b) {
                     return points_(a, split_dim) < points_(b, split_dim);
                   });
  const double split_val = points_(perm_[mid], split_dim);

  nodes_[idx].split_dim = split_dim;
  nodes_[idx].split_val = split_val;
  const int left = build(begin, mid);
  nodes_[idx].left = left;
  const int right = build(mid, end);
  nodes_[idx].right = right;
  return idx;
}

void KdTree::query_radius(const Eigen::MatrixXd& queries, int query_row,
                          double radius,
                          std::vector<std::pair<int, double>>* out,
                          std::int64_t* nodes_visited) const {
  if (queries.cols() != points_.cols()) {
    throw std::invalid_argument("query dimension does not match tree points");
  }
  if (query_row < 0 || query_row >= queries.rows()) {
    throw std::out_of_range("query row out of range");
  }
  out->clear();
  if (radius < 0.0) return;  // closed ball of negative radius is empty

  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (nodes_visited) ++*nodes_visited;

    if (node.left < 0) {
      for (int p = node.begin; p < node.end; ++p) {
        const int j = perm_[p];
        const double dist = row_distance(queries, query_row, points_, j);
        if (dist <= radius) out->emplace_back(j, dist);
      }
      continue;
    }
    // Children partition the range by split_val: left holds coordinates
    // <= split_val, right holds >= split_val. Inclusive comparisons keep
    // boundary points, matching the closed-ball contract.
    const double q = queries(query_row, node.split_dim);
    if (q - radius <= node.split_val) stack.push_back(node.left);
    if (q + radius >= node.split_val) stack.push_back(node.right);
  }
}

ActiveSet kdtree_check(const Embedding& e, const SparseGraph& g) {
  require_match(e, g);
  if (e.model != ModelKind::L2) {
    throw std::invalid_argument("kdtree_check requires the l2 model");
  }
  const int n = g.num_nodes();
  KdTree tree(e.y);

  ActiveSet active;
  active.total_dyads =
      static_cast<std::int64_t>(n) * (g.include_self_loops() ? n : n - 1);

  std::vector<std::pair<int, double>> ball;
  for (int i = 0; i < n; ++i) {
    tree.query_radius(e.x, i, e.bias, &ball);
    std::sort(ball.begin(), ball.end());
    const auto nbrs = g.neighbors(i);

    // Merge the closed ball (logit >= 0) with the stored out-neighbors.
    // A link inside the ball is still wrong when it sits exactly on the
    // boundary; links outside and non-links inside are always wrong.
    std::size_t bi = 0, ni = 0;
    while (bi < ball.size() || ni < nbrs.size()) {
      const int bj = bi < ball.size() ? ball[bi].first
                                      : std::numeric_limits<int>::max();
      const int nj = ni < nbrs.size() ? nbrs[ni]
                                      : std::numeric_limits<int>::max();
      if (bj < nj) {
        if (bj != i || g.include_self_loops()) active.dyads.push_back({i, bj, -1.0});
        ++bi;
      } else if (nj < bj) {
        active.dyads.push_back({i, nj, 1.0});
        ++ni;
      } else {
        if (e.bias - ball[bi].second <= 0.0) {
          active.dyads.push_back({i, bj, 1.0});
        }
        ++bi;
        ++ni;
      }
    }
  }
  return active;
}

ActiveSet compute_active_set(const Embedding& e, const SparseGraph& g,
                             CheckMethod method, int dense_cap) {
  switch (method) {
    case CheckMethod::Dense:
      return dense_check(e, g, dense_cap).active;
    case CheckMethod::KdTreeRadius:
      return kdtree_check(e, g);
    case CheckMethod::Auto:
      if (e.model == ModelKind::L2) return kdtree_check(e, g);
      return dense_check(e, g, dense_cap).active;
  }
  throw std::logic_error("unknown check method");
}

RefineResult refine_hinge_active_set(Embedding& e, const SparseGraph& g,
                                     double margin, const RefineConfig& cfg) {
  if (cfg.inner_epochs < 1 || cfg.max_rounds < 1) {
    throw std::invalid_argument("refine budgets must be positive");
  }

  RefineResult res;
  ActiveSet s = compute_active_set(e, g);
  if (s.empty()) {
    res.exact = true;
    return res;
  }

  AdamState adam(e);
  PlateauScheduler sched(cfg.lr0, cfg.patience_k);
  bool lr_exhausted = false;
  for (int round = 1; round <= cfg.max_rounds && !lr_exhausted; ++round) {
    for (int inner = 0; inner < cfg.inner_epochs; ++inner) {
      const LossGrad lg = hinge_loss(e, s, margin);
      adam.step(e, lg, sched.lr());
      ++res.epochs_used;
      if (sched.observe(lg.value) < cfg.lr_floor) {
        lr_exhausted = true;
        break;
      }
    }
    s = compute_active_set(e, g);
    res.misclassified_per_round.push_back(s.misclassified());
    res.rounds_used = round;
    if (s.empty()) {
      res.exact = true;
      break;
    }
  }
  return res;
}

}  // namespace eed

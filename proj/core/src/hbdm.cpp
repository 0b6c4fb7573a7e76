#include "eed/hbdm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "eed/rng.hpp"

namespace eed {

namespace {

constexpr double kPhiFloor = 1e-12;  // keeps 1/phi weights finite

bool all_rows_identical(const Eigen::MatrixXd& points) {
  for (Eigen::Index i = 1; i < points.rows(); ++i) {
    if (points.row(i) != points.row(0)) return false;
  }
  return true;
}

KMeansSplit index_halves_split(const Eigen::MatrixXd& points) {
  KMeansSplit s;
  const int m = static_cast<int>(points.rows());
  for (int i = 0; i < m; ++i) (i < m / 2 ? s.left : s.right).push_back(i);
  auto mean_of = [&](const std::vector<int>& ids) {
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(points.cols());
    for (int i : ids) mu += points.row(i);
    return Eigen::RowVectorXd(mu / static_cast<double>(ids.size()));
  };
  s.mu_left = mean_of(s.left);
  s.mu_right = mean_of(s.right);
  s.objective.push_back(0.0);
  return s;
}

KMeansSplit kmeans_run(const Eigen::MatrixXd& points, int start_row,
                       int max_iters) {
  const int m = static_cast<int>(points.rows());
  Eigen::RowVectorXd mu[2];
  mu[0] = points.row(start_row);
  // Second centroid: the point farthest from the first. Nonzero because the
  // identical-points case is handled before we get here.
  int far_row = 0;
  double far_dist = -1.0;
  for (int i = 0; i < m; ++i) {
    const double dist = (points.row(i) - mu[0]).norm();
    if (dist > far_dist) {
      far_dist = dist;
      far_row = i;
    }
  }
  mu[1] = points.row(far_row);

  KMeansSplit split;
  std::vector<int> assign(m, -1);
  std::vector<double> dist_to_own(m, 0.0);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    int count[2] = {0, 0};
    for (int i = 0; i < m; ++i) {
      const double d0 = (points.row(i) - mu[0]).norm();
      const double d1 = (points.row(i) - mu[1]).norm();
      const int a = d1 < d0 ? 1 : 0;
      dist_to_own[i] = a == 0 ? d0 : d1;
      if (a != assign[i]) {
        assign[i] = a;
        changed = true;
      }
      ++count[a];
    }
    for (int k = 0; k < 2; ++k) {
      if (count[k] > 0) continue;
      // Re-seed an emptied cluster with the point farthest from the other
      // centroid so both sides stay nonempty.
      int far = 0;
      for (int i = 1; i < m; ++i) {
        if (dist_to_own[i] > dist_to_own[far]) far = i;
      }
      assign[far] = k;
      dist_to_own[far] = (points.row(far) - mu[k]).norm();
      changed = true;
    }
    split.objective.push_back(
        std::accumulate(dist_to_own.begin(), dist_to_own.end(), 0.0));
    if (!changed) break;

    Eigen::RowVectorXd num[2] = {Eigen::RowVectorXd::Zero(points.cols()),
                                 Eigen::RowVectorXd::Zero(points.cols())};
    double den[2] = {0.0, 0.0};
    for (int i = 0; i < m; ++i) {
      const double phi = std::max(dist_to_own[i], kPhiFloor);
      num[assign[i]] += points.row(i) / phi;
      den[assign[i]] += 1.0 / phi;
    }
    for (int k = 0; k < 2; ++k) mu[k] = num[k] / den[k];
  }

  for (int i = 0; i < m; ++i) {
    (assign[i] == 0 ? split.left : split.right).push_back(i);
  }
  split.mu_left = mu[0];
  split.mu_right = mu[1];
  return split;
}

}  // namespace

KMeansSplit euclidean_kmeans_split(const Eigen::MatrixXd& points,
                                   std::uint64_t seed, int max_iters) {
  const int m = static_cast<int>(points.rows());
  if (m < 2) throw std::invalid_argument("need at least 2 points to split");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (all_rows_identical(points)) return index_halves_split(points);

  auto rng = substream(seed, "kmeans");
  std::uniform_int_distribution<int> pick(0, m - 1);
  constexpr int kRestarts = 3;
  KMeansSplit best;
  for (int r = 0; r < kRestarts; ++r) {
    KMeansSplit cur = kmeans_run(points, pick(rng), max_iters);
    if (best.objective.empty() ||
        cur.objective.back() < best.objective.back()) {
      best = std::move(cur);
    }
  }
  return best;
}

std::vector<int> HbdmHierarchy::leaf_ids() const {
  std::vector<int> ids;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    if (nodes[i].is_leaf()) ids.push_back(i);
  }
  return ids;
}

int HbdmHierarchy::max_depth() const {
  int d = 0;
  for (const HbdmNode& n : nodes) d = std::max(d, n.depth);
  return d;
}

int default_leaf_size(int n) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  return std::max(8, static_cast<int>(std::ceil(std::log(n))));
}

HbdmHierarchy build_hierarchy(const Embedding& e, int n_leaf,
                              std::uint64_t seed) {
  if (n_leaf < 2) throw std::invalid_argument("n_leaf must be >= 2");
  const int n = e.num_nodes();
  const int d = e.dim();
  Eigen::MatrixXd z(2 * n, d);
  z.topRows(n) = e.x;
  z.bottomRows(n) = e.y;

  HbdmHierarchy h;
  h.n_leaf = n_leaf;
  h.num_points = 2 * n;
  h.nodes.push_back(HbdmNode{});
  h.nodes[0].members.resize(2 * n);
  std::iota(h.nodes[0].members.begin(), h.nodes[0].members.end(), 0);

  std::uint64_t split_counter = 0;
  std::vector<int> pending{0};
  while (!pending.empty()) {
    const int id = pending.back();
    pending.pop_back();
    // Copy: growing h.nodes below reallocates and would dangle a reference.
    const std::vector<int> members = h.nodes[id].members;
    if (static_cast<int>(members.size()) <= n_leaf) continue;

    Eigen::MatrixXd sub(members.size(), d);
    for (std::size_t r = 0; r < members.size(); ++r) {
      sub.row(static_cast<Eigen::Index>(r)) = z.row(members[r]);
    }
    const KMeansSplit split = euclidean_kmeans_split(
        sub, seed ^ (0x9e3779b97f4a7c15ull * ++split_counter));

    auto make_child = [&](const std::vector<int>& local) {
      HbdmNode child;
      child.parent = id;
      child.depth = h.nodes[id].depth + 1;
      child.members.reserve(local.size());
      for (int r : local) child.members.push_back(members[r]);
      h.nodes.push_back(std::move(child));
      return static_cast<int>(h.nodes.size()) - 1;
    };
    const int left = make_child(split.left);
    const int right = make_child(split.right);
    h.nodes[id].left = left;
    h.nodes[id].right = right;
    pending.push_back(left);
    pending.push_back(right);
  }
  return h;
}

namespace {

Eigen::RowVectorXd member_mean(const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y,
                               const std::vector<int>& members) {
  const int n = static_cast<int>(x.rows());
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(x.cols());
  for (int p : members) mu += p < n ? x.row(p) : y.row(p - n);
  return mu / static_cast<double>(members.size());
}

double softplus_scalar(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid_scalar(double z) { return 0.5 * std::tanh(0.5 * z) + 0.5; }

}  // namespace

LossGrad hbdm_loss(const Embedding& e, const SparseGraph& g,
                   const HbdmHierarchy& h) {
  if (e.model != ModelKind::L2) {
    throw std::invalid_argument("hbdm_loss requires the l2 model");
  }
  if (e.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("embedding and graph node counts differ");
  }
  if (h.num_points != 2 * g.num_nodes()) {
    throw std::invalid_argument("hierarchy was built for a different size");
  }

  const int n = g.num_nodes();
  LossGrad out;
  out.value = 0.0;
  out.grad_x = Eigen::MatrixXd::Zero(n, e.dim());
  out.grad_y = Eigen::MatrixXd::Zero(n, e.dim());
  out.grad_bias = 0.0;

  // Link term, exact: minus the sum of link logits.
  for (int i = 0; i < n; ++i) {
    for (int j : g.neighbors(i)) {
      const double dist = row_distance(e.x, i, e.y, j);
      out.value -= e.bias - dist;
      out.grad_bias -= 1.0;
      if (dist > 0.0) {
        const Eigen::RowVectorXd u = (e.x.row(i) - e.y.row(j)) / dist;
        out.grad_x.row(i) += u;
        out.grad_y.row(j) -= u;
      }
    }
  }

  // Softplus term, exact inside each leaf over ordered (source, target)
  // pairs drawn from the leaf's x and y members.
  std::vector<int> xs, ys;
  for (int leaf : h.leaf_ids()) {
    xs.clear();
    ys.clear();
    for (int p : h.nodes[leaf].members) {
      if (p < n) {
        xs.push_back(p);
      } else {
        ys.push_back(p - n);
      }
    }
    for (int i : xs) {
      for (int j : ys) {
        if (i == j && !g.include_self_loops()) continue;
        const double dist = row_distance(e.x, i, e.y, j);
        const double r = e.bias - dist;
        out.value += softplus_scalar(r);
        const double s = sigmoid_scalar(r);
        out.grad_bias += s;
        if (dist > 0.0) {
          const Eigen::RowVectorXd u =
              (s / dist) * (e.x.row(i) - e.y.row(j));
          out.grad_x.row(i) -= u;
          out.grad_y.row(j) += u;
        }
      }
    }
  }

  // Cross-cluster term: one softplus per ordered pair of sibling centroids,
  // i.e. twice the unordered value per split. Centroids are plain means, so
  // each member receives an equal share of the centroid gradient.
  for (const HbdmNode& node : h.nodes) {
    if (node.is_leaf()) continue;
    const HbdmNode& lc = h.nodes[node.left];
    const HbdmNode& rc = h.nodes[node.right];
    const Eigen::RowVectorXd mu_l = member_mean(e.x, e.y, lc.members);
    const Eigen::RowVectorXd mu_r = member_mean(e.x, e.y, rc.members);
    const double dist = (mu_l - mu_r).norm();
    const double r = e.bias - dist;
    out.value += 2.0 * softplus_scalar(r);
    const double coeff = 2.0 * sigmoid_scalar(r);
    out.grad_bias += coeff;
    if (dist <= 0.0) continue;
    const Eigen::RowVectorXd g_mu_l = (-coeff / dist) * (mu_l - mu_r);
    auto spread = [&](const std::vector<int>& members,
                      const Eigen::RowVectorXd& g_mu) {
      const Eigen::RowVectorXd share =
          g_mu / static_cast<double>(members.size());
      for (int p : members) {
        if (p < n) {
          out.grad_x.row(p) += share;
        } else {
          out.grad_y.row(p - n) += share;
        }
      }
    };
    spread(lc.members, g_mu_l);
    spread(rc.members, -g_mu_l);
  }
  return out;
}

void write_hierarchy_csv(const HbdmHierarchy& h, const Embedding& e,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "level,cluster,member_count,centroid\n";
  char buf[32];
  for (int id = 0; id < static_cast<int>(h.nodes.size()); ++id) {
    const HbdmNode& node = h.nodes[id];
    const Eigen::RowVectorXd mu = member_mean(e.x, e.y, node.members);
    out << node.depth << ',' << id << ',' << node.members.size() << ',';
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", mu[k]);
      out << (k ? " " : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TwoStageResult two_stage_fit(const SparseGraph& g, int d,
                             const TrainConfig& cfg) {
  TwoStageResult res;
  res.embedding = random_embedding(g.num_nodes(), d, ModelKind::L2, cfg.seed);
  res.stage1 = fit(res.embedding, g, LossKind::Hbdm, cfg);

  RefineConfig rcfg;
  rcfg.inner_epochs = cfg.hinge_inner_epochs;
  rcfg.max_rounds = cfg.hinge_max_rounds;
  rcfg.lr0 = cfg.lr0;
  rcfg.lr_floor = cfg.lr_floor;
  rcfg.patience_k = cfg.patience_k;
  rcfg.seed = cfg.seed;
  res.stage2 = refine_hinge_active_set(res.embedding, g, 0.0, rcfg);
  res.exact = res.stage2.exact;
  return res;
}

}  // namespace eed

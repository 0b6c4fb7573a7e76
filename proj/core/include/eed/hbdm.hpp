#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "eed/check.hpp"
#include "eed/graph.hpp"
#include "eed/loss.hpp"
#include "eed/optim.hpp"

namespace eed {

// Binary dendrogram over the 2N stacked embedding rows z = [x; y]. Point
// index p < N refers to x row p, p >= N to y row p - N. Children partition
// their parent, so each depth (with leaves carried down) partitions all 2N
// points.
struct HbdmNode {
  std::vector<int> members;  // indices into the 2N stacked points
  int parent = -1;
  int left = -1;
  int right = -1;
  int depth = 0;
  bool is_leaf() const { return left < 0; }
};

struct HbdmHierarchy {
  std::vector<HbdmNode> nodes;  // nodes[0] is the root
  int n_leaf = 0;
  int num_points = 0;

  std::vector<int> leaf_ids() const;
  int max_depth() const;
};

// Leaf capacity max(8, ceil(ln n)) for a graph of n nodes.
int default_leaf_size(int n);

struct KMeansSplit {
  std::vector<int> left;   // indices into the given point set
  std::vector<int> right;
  Eigen::RowVectorXd mu_left;
  Eigen::RowVectorXd mu_right;
  std::vector<double> objective;  // J after each alternating iteration
};

// Two-way clustering under J = sum_i |z_i - mu_assigned|: assign to the
// nearest centroid, then re-estimate each centroid as the mean weighted by
// 1/|z_i - mu| (the auxiliary-bound update for the unsquared objective).
// Identical points split by index halves.
KMeansSplit euclidean_kmeans_split(const Eigen::MatrixXd& points,
                                   std::uint64_t seed, int max_iters = 50);

HbdmHierarchy build_hierarchy(const Embedding& e, int n_leaf,
                              std::uint64_t seed);

// Negated hierarchical Bernoulli log-likelihood: the link term is exact, the
// softplus term is exact for ordered (x_i, y_j) pairs inside each leaf, and
// cross-cluster mass is approximated by one softplus per ordered pair of
// sibling centroids. Centroids are means of the current points, so gradients
// flow through them to the members.
LossGrad hbdm_loss(const Embedding& e, const SparseGraph& g,
                   const HbdmHierarchy& h);

void write_hierarchy_csv(const HbdmHierarchy& h, const Embedding& e,
                         const std::string& path);

struct TwoStageResult {
  Embedding embedding;
  TrainTrace stage1;
  RefineResult stage2;
  bool exact = false;
};

// Large-graph pipeline: stage one trains the hierarchical likelihood
// (rebuilding the hierarchy every cfg.hbdm_refresh epochs), stage two
// polishes remaining misclassified dyads with zero-margin hinge rounds.
TwoStageResult two_stage_fit(const SparseGraph& g, int d,
                             const TrainConfig& cfg);

}  // namespace eed

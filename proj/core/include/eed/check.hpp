#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "eed/embedding.hpp"
#include "eed/graph.hpp"

namespace eed {

// Exactness is strict: a dyad whose logit is exactly zero is misclassified
// no matter its label, so "exact" always means sign(logit) reproduces every
// link and non-link.
struct ActiveDyad {
  int i = 0;
  int j = 0;
  double label_shifted = 0.0;  // 2a - 1
};

struct ActiveSet {
  std::vector<ActiveDyad> dyads;
  std::int64_t total_dyads = 0;
  bool empty() const { return dyads.empty(); }
  std::int64_t misclassified() const {
    return static_cast<std::int64_t>(dyads.size());
  }
};

void write_active_set_csv(const ActiveSet& s, const std::string& path);

struct DenseCheckResult {
  double frobenius_rel_error = 0.0;
  ActiveSet active;
};

// Scans every ordered dyad (diagonal included only when the graph models
// self-loops). Guarded by a node cap; larger graphs must use kdtree_check.
DenseCheckResult dense_check(const Embedding& e, const SparseGraph& g,
                             int node_cap = 20000);

// Static KD-tree over row points; median split on the widest-spread
// coordinate. Radius queries return the closed ball {p : |q - p| <= radius}.
class KdTree {
 public:
  explicit KdTree(const Eigen::MatrixXd& points, int leaf_size = 16);

  // Appends (point index, distance) pairs; distances are computed with the
  // same kernel as Embedding::logit so boundary ties agree bit for bit.
  void query_radius(const Eigen::MatrixXd& queries, int query_row,
                    double radius, std::vector<std::pair<int, double>>* out,
                    std::int64_t* nodes_visited = nullptr) const;

  int size() const { return static_cast<int>(points_.rows()); }

 private:
  struct Node {
    int begin, end;        // range into perm_
    int left = -1, right = -1;
    int split_dim = -1;
    double split_val = 0.0;
  };

  int build(int begin, int end);

  Eigen::MatrixXd points_;
  int leaf_size_;
  std::vector<int> perm_;
  std::vector<Node> nodes_;
};

// Fixed-radius neighbor check for the distance model: a KD-tree over the
// rows of y answers a closed-ball query of radius bias around every x_i, and
// the result is compared against the stored out-neighborhood of i. Produces
// the same active set as dense_check.
ActiveSet kdtree_check(const Embedding& e, const SparseGraph& g);

enum class CheckMethod { Dense, KdTreeRadius, Auto };

ActiveSet compute_active_set(const Embedding& e, const SparseGraph& g,
                             CheckMethod method = CheckMethod::Auto,
                             int dense_cap = 20000);

struct RefineConfig {
  int inner_epochs = 50;  // Adam epochs between active-set recomputations
  int max_rounds = 100;
  double lr0 = 0.1;
  double lr_floor = 1e-6;
  int patience_k = 200;
  std::uint64_t seed = 0;
};

struct RefineResult {
  std::vector<std::int64_t> misclassified_per_round;  // after each round
  bool exact = false;
  int rounds_used = 0;
  int epochs_used = 0;
};

// Zero-margin hinge refinement: repeatedly extract the active set and run
// Adam on the hinge loss restricted to it (bias stays trainable). Stops when
// the set empties or the round budget runs out; budget exhaustion is a
// non-exact result, not an error.
RefineResult refine_hinge_active_set(Embedding& e, const SparseGraph& g,
                                     double margin, const RefineConfig& cfg);

}  // namespace eed

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eed/embedding.hpp"
#include "eed/graph.hpp"
#include "eed/optim.hpp"

namespace eed {

struct SvdResult {
  Eigen::MatrixXd u;  // rows x d
  Eigen::VectorXd s;  // d singular values, descending
  Eigen::MatrixXd v;  // cols x d, orthonormal columns
};

// Randomized subspace iteration (fixed oversampling and power iterations);
// deterministic given the seed.
SvdResult truncated_svd(const Eigen::MatrixXd& m, int d, std::uint64_t seed,
                        int oversample = 10, int power_iters = 2);

// Rank change for the next search trial. Down-projection stacks z = [x; y],
// centers it first for the translation-invariant distance model, and
// projects onto the top right singular vectors. Up-projection pads zero
// columns perturbed with N(0, 1e-4) noise. The bias carries over unchanged.
Embedding warm_start(const Embedding& e, int d_new, std::uint64_t seed);

struct SearchConfig {
  int lb = 1;
  int ub = 64;
  ModelKind model = ModelKind::L2;
  LossKind loss = LossKind::Full;
  TrainConfig train;
};

struct TrialRecord {
  int d = 0;
  bool exact = false;
  int epochs_used = 0;
  std::int64_t misclassified = 0;
};

struct SearchResult {
  std::optional<int> d_star;
  std::vector<TrialRecord> trials;
  std::optional<Embedding> best;      // exact embedding at d_star
  std::optional<TrainTrace> best_trace;
  bool aborted_at_ub = false;
};

// Binary search over embedding rank: first train at ub from random init and
// abort if even that fails; then bisect [lb, ub], warm-starting every trial
// from the most recent successful solution. On success at D the upper half
// is discarded (ub = D - 1) and parameters are adopted; on failure the lower
// half is (lb = D + 1). The reported best embedding is re-verified by an
// independent check.
SearchResult search_eed(const SparseGraph& g, const SearchConfig& cfg);

// JSON document with the config echo, trial table, d_star, and the path the
// winning embedding was (or will be) written to.
std::string search_result_to_json(const SearchResult& r,
                                  const SearchConfig& cfg,
                                  const std::string& embedding_path);

}  // namespace eed

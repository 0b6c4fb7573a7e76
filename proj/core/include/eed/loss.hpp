#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "eed/check.hpp"
#include "eed/embedding.hpp"
#include "eed/graph.hpp"

namespace eed {

// Overflow-safe softplus; exact for |z| up to ~1e308 and never produces inf
// for |z| <= 1e6.
inline double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double t = std::exp(z);
  return t / (1.0 + t);
}

struct DyadSample {
  int i = 0;
  int j = 0;
  double label_shifted = 0.0;  // 2a - 1
  double weight = 1.0;
};

struct LossGrad {
  double value = 0.0;
  Eigen::MatrixXd grad_x;
  Eigen::MatrixXd grad_y;
  double grad_bias = 0.0;  // zero for models without a bias
};

// Bernoulli negative log-likelihood over every dyad of the graph:
// sum of softplus(-label * logit). Gradients are analytic for all three
// models; the distance gradient at coincident points is defined as zero.
LossGrad logistic_loss_full(const Embedding& e, const SparseGraph& g);

// sum over the active set of max(0, margin - label * logit), with
// subgradient zero exactly at the kink.
LossGrad hinge_loss(const Embedding& e, const ActiveSet& s,
                    double margin = 0.0);

// Logistic loss restricted to the dyads induced by a node batch.
LossGrad rn_loss(const Embedding& e, const SparseGraph& g,
                 std::span<const int> batch_nodes);

// Case-control sample: for every node, all its links (weight 1) plus
// k * degree non-link targets drawn uniformly with replacement, each
// weighted by (N - degree) / drawn_count to unbias the non-link term.
std::vector<DyadSample> cc_sample(const SparseGraph& g, int k,
                                  std::uint64_t seed);

// Weighted logistic loss over explicit dyad samples.
LossGrad cc_loss(const Embedding& e, std::span<const DyadSample> samples);

}  // namespace eed

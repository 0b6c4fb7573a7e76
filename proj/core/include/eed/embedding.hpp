#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace eed {

// Reconstruction rules, sharing the convention that a dyad (i, j) is
// predicted as a link iff its logit is strictly positive:
//   Lpca: logit = <x_i, y_j>
//   Eig:  logit = bias + <x_i, y_j>
//   L2:   logit = bias - |x_i - y_j|
enum class ModelKind { Lpca, Eig, L2 };

std::string to_string(ModelKind m);
ModelKind model_kind_from_string(const std::string& s);

struct Embedding {
  Eigen::MatrixXd x;  // N x D source positions
  Eigen::MatrixXd y;  // N x D target positions
  double bias = 0.0;  // ignored by Lpca; >= 0 for L2 (ball radius)
  ModelKind model = ModelKind::Lpca;

  int num_nodes() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
  bool has_bias() const { return model != ModelKind::Lpca; }

  double logit(int i, int j) const;
  bool predicts_link(int i, int j) const { return logit(i, j) > 0.0; }
};

// Shared distance kernel. Every component that compares a distance against
// the bias (logits, dense scans, ball queries) must go through this function
// so that the r == 0 boundary is decided on identical floating-point values.
inline double row_distance(const Eigen::MatrixXd& a, int i,
                           const Eigen::MatrixXd& b, int j) {
  return (a.row(i) - b.row(j)).norm();
}

// Sign-preserving conversions between the model families. Each output
// reproduces the input's link predictions exactly, dyad for dyad.

// L2 (dim D) -> Lpca (dim D + 2); requires bias >= 0.
Embedding lpca_from_l2(const Embedding& e);

// Lpca (dim D) -> L2 (dim D, bias sqrt(2)) by row normalization. Accepts an
// Eig input by folding its bias first (output dim D + 1). Zero rows cannot
// be normalized and raise an error naming the offending row.
Embedding l2_from_lpca(const Embedding& e);

// Lpca (dim D) -> Eig (dim D, bias 0).
Embedding eig_from_lpca(const Embedding& e);

// Eig (dim D) -> Lpca (dim D + 1) by absorbing the bias into a column pair.
Embedding lpca_from_eig(const Embedding& e);

// Text format, 64-bit doubles at 17 significant digits (round-trip exact):
//   EED1 <model> <N> <D> <bias|NA>
//   N rows of x, then N rows of y, D values per row.
void save_embedding(const Embedding& e, const std::string& path);
Embedding load_embedding(const std::string& path);

}  // namespace eed

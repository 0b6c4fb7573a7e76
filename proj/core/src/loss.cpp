#include "eed/loss.hpp"

#include <algorithm>
#include <stdexcept>

#include "eed/rng.hpp"

namespace eed {

namespace {

constexpr int kBlockRows = 256;

void require_shape(const Embedding& e, const SparseGraph& g) {
  if (e.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("embedding has " +
                                std::to_string(e.num_nodes()) +
                                " nodes but graph has " +
                                std::to_string(g.num_nodes()));
  }
}

// Adds the gradient of `coeff * logit(i, j)` to out. The distance gradient
// at coincident points is defined as zero.
void add_logit_gradient(const Embedding& e, int i, int j, double coeff,
                        LossGrad* out) {
  switch (e.model) {
    case ModelKind::Lpca:
      out->grad_x.row(i) += coeff * e.y.row(j);
      out->grad_y.row(j) += coeff * e.x.row(i);
      return;
    case ModelKind::Eig:
      out->grad_x.row(i) += coeff * e.y.row(j);
      out->grad_y.row(j) += coeff * e.x.row(i);
      out->grad_bias += coeff;
      return;
    case ModelKind::L2: {
      const double dist = row_distance(e.x, i, e.y, j);
      out->grad_bias += coeff;
      if (dist > 0.0) {
        const Eigen::RowVectorXd u = (e.x.row(i) - e.y.row(j)) / dist;
        out->grad_x.row(i) -= coeff * u;
        out->grad_y.row(j) += coeff * u;
      }
      return;
    }
  }
}

LossGrad zero_grad(const Embedding& e) {
  LossGrad g;
  g.grad_x = Eigen::MatrixXd::Zero(e.num_nodes(), e.dim());
  g.grad_y = Eigen::MatrixXd::Zero(e.num_nodes(), e.dim());
  return g;
}

// Blocked full-graph logistic loss. Uses the decomposition
//   softplus(-label * r) = softplus(r) - a * r,   a = (label + 1) / 2,
// so only link positions need individual treatment, and
//   d/dr = sigmoid(r) - a.
LossGrad full_loss_dot_models(const Embedding& e, const SparseGraph& g) {
  const int n = e.num_nodes();
  const bool diag = g.include_self_loops();
  LossGrad out = zero_grad(e);

  for (int b0 = 0; b0 < n; b0 += kBlockRows) {
    const int bs = std::min(kBlockRows, n - b0);
    Eigen::MatrixXd r = e.x.middleRows(b0, bs) * e.y.transpose();
    if (e.model == ModelKind::Eig) r.array() += e.bias;

    out.value += (r.array().max(0.0) + (-r.array().abs()).exp().log1p()).sum();
    Eigen::MatrixXd s = (0.5 * (r.array() * 0.5).tanh() + 0.5).matrix();

    for (int bi = 0; bi < bs; ++bi) {
      const int i = b0 + bi;
      for (int j : g.neighbors(i)) {
        out.value -= r(bi, j);
        s(bi, j) -= 1.0;
      }
      if (!diag) {
        const double rd = r(bi, i);
        out.value -= std::max(rd, 0.0) + std::log1p(std::exp(-std::abs(rd)));
        s(bi, i) = 0.0;
      }
    }

    out.grad_x.middleRows(b0, bs) = s * e.y;
    out.grad_y.noalias() += s.transpose() * e.x.middleRows(b0, bs);
    if (e.model == ModelKind::Eig) out.grad_bias += s.sum();
  }
  return out;
}

LossGrad full_loss_l2(const Embedding& e, const SparseGraph& g) {
  const int n = e.num_nodes();
  const bool diag = g.include_self_loops();
  LossGrad out = zero_grad(e);

  const Eigen::VectorXd y_sq = e.y.rowwise().squaredNorm();
  Eigen::RowVectorXd col_w_sum = Eigen::RowVectorXd::Zero(n);

  for (int b0 = 0; b0 < n; b0 += kBlockRows) {
    const int bs = std::min(kBlockRows, n - b0);
    const auto xb = e.x.middleRows(b0, bs);
    const Eigen::VectorXd x_sq = xb.rowwise().squaredNorm();

    Eigen::MatrixXd dist = -2.0 * (xb * e.y.transpose());
    dist.colwise() += x_sq;
    dist.rowwise() += y_sq.transpose();
    dist = dist.array().max(0.0).sqrt().matrix();

    Eigen::ArrayXXd r = e.bias - dist.array();
    out.value += (r.max(0.0) + (-r.abs()).exp().log1p()).sum();
    Eigen::ArrayXXd s = 0.5 * (r * 0.5).tanh() + 0.5;

    for (int bi = 0; bi < bs; ++bi) {
      const int i = b0 + bi;
      for (int j : g.neighbors(i)) {
        out.value -= r(bi, j);
        s(bi, j) -= 1.0;
      }
      if (!diag) {
        const double rd = r(bi, i);
        out.value -= std::max(rd, 0.0) + std::log1p(std::exp(-std::abs(rd)));
        s(bi, i) = 0.0;
      }
    }

    out.grad_bias += s.sum();

    // r = bias - dist, so dL/d dist = -s and with w = s / dist:
    //   dL/dx_i = (W y)_i - rowsum(W)_i x_i
    //   dL/dy_j = (W^T x)_j - colsum(W)_j y_j
    Eigen::MatrixXd w =
        (dist.array() > 0.0).select(s / dist.array(), 0.0).matrix();
    const Eigen::VectorXd row_w = w.rowwise().sum();
    out.grad_x.middleRows(b0, bs) = w * e.y - row_w.asDiagonal() * xb;
    out.grad_y.noalias() += w.transpose() * xb;
    col_w_sum += w.colwise().sum();
  }
  out.grad_y -= col_w_sum.transpose().asDiagonal() * e.y;
  return out;
}

}  // namespace

LossGrad logistic_loss_full(const Embedding& e, const SparseGraph& g) {
  require_shape(e, g);
  return e.model == ModelKind::L2 ? full_loss_l2(e, g)
                                  : full_loss_dot_models(e, g);
}

LossGrad hinge_loss(const Embedding& e, const ActiveSet& s, double margin) {
  if (margin < 0.0) throw std::invalid_argument("margin must be >= 0");
  LossGrad out = zero_grad(e);
  for (const ActiveDyad& d : s.dyads) {
    const double r = e.logit(d.i, d.j);
    const double t = margin - d.label_shifted * r;
    if (t > 0.0) {
      out.value += t;
      add_logit_gradient(e, d.i, d.j, -d.label_shifted, &out);
    }
  }
  if (e.model == ModelKind::Lpca) out.grad_bias = 0.0;
  return out;
}

LossGrad rn_loss(const Embedding& e, const SparseGraph& g,
                 std::span<const int> batch_nodes) {
  require_shape(e, g);
  for (int i : batch_nodes) {
    if (i < 0 || i >= g.num_nodes()) {
      throw std::out_of_range("batch node " + std::to_string(i) +
                              " out of range");
    }
  }
  const bool diag = g.include_self_loops();
  LossGrad out = zero_grad(e);
  for (int i : batch_nodes) {
    for (int j : batch_nodes) {
      if (i == j && !diag) continue;
      const double r = e.logit(i, j);
      const double a = g.has_edge(i, j) ? 1.0 : 0.0;
      const double z = (2.0 * a - 1.0) * r;
      out.value += std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)));
      add_logit_gradient(e, i, j, sigmoid(r) - a, &out);
    }
  }
  if (e.model == ModelKind::Lpca) out.grad_bias = 0.0;
  return out;
}

std::vector<DyadSample> cc_sample(const SparseGraph& g, int k,
                                  std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("cc sampling needs k >= 1");
  const int n = g.num_nodes();
  auto rng = substream(seed, "sampling");
  std::uniform_int_distribution<int> pick(0, n - 1);

  std::vector<DyadSample> samples;
  for (int i = 0; i < n; ++i) {
    const int deg = g.out_degree(i);
    for (int j : g.neighbors(i)) {
      samples.push_back({i, j, 1.0, 1.0});
    }
    if (deg == 0) continue;
    const std::int64_t candidates =
        n - (g.include_self_loops() ? 0 : 1) - deg;
    if (candidates <= 0) continue;  // fully connected node: links only

    const int draws = k * deg;
    const double w = static_cast<double>(n - deg) / draws;
    for (int t = 0; t < draws; ++t) {
      int j;
      do {
        j = pick(rng);
      } while ((j == i && !g.include_self_loops()) || g.has_edge(i, j));
      samples.push_back({i, j, -1.0, w});
    }
  }
  return samples;
}

LossGrad cc_loss(const Embedding& e, std::span<const DyadSample> samples) {
  LossGrad out = zero_grad(e);
  for (const DyadSample& d : samples) {
    const double r = e.logit(d.i, d.j);
    const double z = d.label_shifted * r;
    out.value +=
        d.weight * (std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z))));
    const double a = (d.label_shifted + 1.0) * 0.5;
    add_logit_gradient(e, d.i, d.j, d.weight * (sigmoid(r) - a), &out);
  }
  if (e.model == ModelKind::Lpca) out.grad_bias = 0.0;
  return out;
}

}  // namespace eed

#include "eed/optim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "eed/check.hpp"
#include "eed/hbdm.hpp"
#include "eed/rng.hpp"

namespace eed {

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::Full: return "full";
    case LossKind::Rn: return "rn";
    case LossKind::Cc: return "cc";
    case LossKind::Hbdm: return "hbdm";
  }
  throw std::logic_error("unknown loss kind");
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "full") return LossKind::Full;
  if (s == "rn") return LossKind::Rn;
  if (s == "cc") return LossKind::Cc;
  if (s == "hbdm") return LossKind::Hbdm;
  throw std::invalid_argument("unknown loss '" + s +
                              "' (expected full, rn, cc, or hbdm)");
}

AdamState::AdamState(const Embedding& shape_like, AdamConfig cfg) : cfg_(cfg) {
  const int n = shape_like.num_nodes();
  const int d = shape_like.dim();
  m_x_ = Eigen::MatrixXd::Zero(n, d);
  v_x_ = Eigen::MatrixXd::Zero(n, d);
  m_y_ = Eigen::MatrixXd::Zero(n, d);
  v_y_ = Eigen::MatrixXd::Zero(n, d);
}

void AdamState::step(Embedding& e, const LossGrad& g, double lr) {
  if (!g.grad_x.allFinite()) {
    throw std::runtime_error("non-finite gradient for parameter block x");
  }
  if (!g.grad_y.allFinite()) {
    throw std::runtime_error("non-finite gradient for parameter block y");
  }
  if (!std::isfinite(g.grad_bias)) {
    throw std::runtime_error("non-finite gradient for parameter block bias");
  }

  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));

  auto update = [&](Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                    const Eigen::MatrixXd& grad, Eigen::MatrixXd& param) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad;
    v = cfg_.beta2 * v.array().matrix() +
        (1.0 - cfg_.beta2) * grad.array().square().matrix();
    param.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg_.eps);
  };
  update(m_x_, v_x_, g.grad_x, e.x);
  update(m_y_, v_y_, g.grad_y, e.y);

  if (e.has_bias()) {
    m_b_ = cfg_.beta1 * m_b_ + (1.0 - cfg_.beta1) * g.grad_bias;
    v_b_ = cfg_.beta2 * v_b_ + (1.0 - cfg_.beta2) * g.grad_bias * g.grad_bias;
    e.bias -= lr * (m_b_ / bc1) / (std::sqrt(v_b_ / bc2) + cfg_.eps);
    if (e.model == ModelKind::L2 && e.bias < 0.0) e.bias = 0.0;
  }
}

void write_trace_csv(const TrainTrace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "epoch,loss,lr,misclassified\n";
  char buf[64];
  for (const TraceRow& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,", r.epoch, r.loss, r.lr);
    out << buf << r.misclassified << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Embedding random_embedding(int n, int d, ModelKind model, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("need n >= 1 and d >= 1");
  auto rng = substream(seed, "init");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Embedding e;
  e.model = model;
  e.x.resize(n, d);
  e.y.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) e.x(i, k) = gauss(rng);
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) e.y(i, k) = gauss(rng);
  }
  if (e.has_bias()) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    e.bias = unif(rng);
  }
  return e;
}

TrainTrace fit_with(Embedding& e, const SparseGraph& g, const LossFn& loss,
                    const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.lr0 <= 0.0 || cfg.patience_k < 1 ||
      cfg.check_every < 1) {
    throw std::invalid_argument("train config fields must be positive");
  }

  TrainTrace trace;
  auto misclassified = [&]() {
    return compute_active_set(e, g, CheckMethod::Auto, cfg.dense_cap)
        .misclassified();
  };

  trace.final_misclassified = misclassified();
  if (trace.final_misclassified == 0) {
    trace.exact = true;
    return trace;
  }

  AdamState adam(e);
  PlateauScheduler sched(cfg.lr0, cfg.patience_k);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const LossGrad lg = loss(e, epoch);
    const double lr = sched.lr();
    adam.step(e, lg, lr);
    const double next_lr = sched.observe(lg.value);

    TraceRow row{epoch, lg.value, lr, -1};
    trace.epochs_used = epoch;
    if (epoch % cfg.check_every == 0) {
      row.misclassified = misclassified();
      trace.final_misclassified = row.misclassified;
    }
    trace.rows.push_back(row);
    if (row.misclassified == 0) {
      trace.exact = true;
      return trace;
    }
    if (next_lr < cfg.lr_floor) break;
  }

  trace.final_misclassified = misclassified();
  trace.exact = trace.final_misclassified == 0;
  if (!trace.rows.empty()) {
    trace.rows.back().misclassified = trace.final_misclassified;
  }
  return trace;
}

TrainTrace fit(Embedding& e, const SparseGraph& g, LossKind kind,
               const TrainConfig& cfg) {
  switch (kind) {
    case LossKind::Full:
      return fit_with(
          e, g, [&](const Embedding& cur, int) { return logistic_loss_full(cur, g); },
          cfg);
    case LossKind::Rn: {
      const int n = g.num_nodes();
      const int batch =
          cfg.rn_batch > 0 ? std::min(cfg.rn_batch, n) : std::min(n, 1024);
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      return fit_with(
          e, g,
          [&, all, batch](const Embedding& cur, int epoch) {
            auto rng = substream(cfg.seed, "sampling",
                                 static_cast<std::uint64_t>(epoch));
            std::vector<int> b;
            b.reserve(batch);
            std::sample(all.begin(), all.end(), std::back_inserter(b), batch,
                        rng);
            return rn_loss(cur, g, b);
          },
          cfg);
    }
    case LossKind::Cc:
      return fit_with(
          e, g,
          [&](const Embedding& cur, int epoch) {
            const std::uint64_t epoch_seed =
                cfg.seed ^ (0x9e3779b97f4a7c15ull *
                            static_cast<std::uint64_t>(epoch + 1));
            const auto samples = cc_sample(g, cfg.cc_k, epoch_seed);
            return cc_loss(cur, samples);
          },
          cfg);
    case LossKind::Hbdm: {
      if (e.model != ModelKind::L2) {
        throw std::invalid_argument(
            "hierarchical likelihood requires the l2 model");
      }
      const int n_leaf = default_leaf_size(g.num_nodes());
      auto hierarchy = std::make_shared<HbdmHierarchy>();
      auto rebuilds = std::make_shared<std::uint64_t>(0);
      return fit_with(
          e, g,
          [&, hierarchy, rebuilds, n_leaf](const Embedding& cur, int epoch) {
            if ((epoch - 1) % cfg.hbdm_refresh == 0) {
              *hierarchy = build_hierarchy(
                  cur, n_leaf, cfg.seed ^ (0x9e3779b97f4a7c15ull * (*rebuilds)++));
            }
            return hbdm_loss(cur, g, *hierarchy);
          },
          cfg);
    }
  }
  throw std::logic_error("unknown loss kind");
}

}  // namespace eed

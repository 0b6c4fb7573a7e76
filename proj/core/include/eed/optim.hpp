#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "eed/embedding.hpp"
#include "eed/graph.hpp"
#include "eed/loss.hpp"

namespace eed {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over (x, y, bias). For the distance model the bias is
// projected back to [0, inf) after each step, keeping it a valid radius.
class AdamState {
 public:
  AdamState(const Embedding& shape_like, AdamConfig cfg = {});

  void step(Embedding& e, const LossGrad& g, double lr);
  std::int64_t steps() const { return step_; }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  Eigen::MatrixXd m_x_, v_x_, m_y_, v_y_;
  double m_b_ = 0.0, v_b_ = 0.0;
};

// Halves the learning rate after patience_k consecutive epochs without a
// strict improvement of the best seen loss; the stall counter resets both on
// improvement and on halving.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr0, int patience_k)
      : lr_(lr0), patience_(patience_k) {}

  double observe(double loss) {
    if (loss < best_) {
      best_ = loss;
      stale_ = 0;
    } else if (++stale_ >= patience_) {
      lr_ *= 0.5;
      stale_ = 0;
    }
    return lr_;
  }
  double lr() const { return lr_; }

 private:
  double lr_;
  int patience_;
  double best_ = std::numeric_limits<double>::infinity();
  int stale_ = 0;
};

enum class LossKind { Full, Rn, Cc, Hbdm };

std::string to_string(LossKind k);
LossKind loss_kind_from_string(const std::string& s);

struct TrainConfig {
  int epochs = 5000;
  double lr0 = 0.1;
  int patience_k = 200;
  int check_every = 100;
  std::uint64_t seed = 0;

  double lr_floor = 1e-6;   // non-exact convergence stop
  int dense_cap = 20000;    // dense-check guard for non-L2 models
  int rn_batch = 0;         // 0: min(N, 1024)
  int cc_k = 5;
  int hbdm_refresh = 25;    // hierarchy rebuild cadence, epochs
  int hinge_inner_epochs = 50;
  int hinge_max_rounds = 100;
};

struct TraceRow {
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
  std::int64_t misclassified = -1;  // -1 when this epoch ran no check
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  bool exact = false;
  int epochs_used = 0;
  std::int64_t final_misclassified = -1;
};

void write_trace_csv(const TrainTrace& t, const std::string& path);

// N(0,1) coordinates; models with a bias draw it from U(0,1).
Embedding random_embedding(int n, int d, ModelKind model, std::uint64_t seed);

// Generic training loop: per epoch evaluate loss(e, epoch), take one Adam
// step, schedule the learning rate. Every check_every epochs (and before the
// first one) the reconstruction check runs; training stops early when it
// finds zero misclassified dyads, or when lr falls below lr_floor.
using LossFn = std::function<LossGrad(const Embedding&, int epoch)>;
TrainTrace fit_with(Embedding& e, const SparseGraph& g, const LossFn& loss,
                    const TrainConfig& cfg);

// Dispatch on the named objectives. Rn and Cc resample per epoch from the
// config seed. Hbdm here runs only the likelihood stage (see two_stage_fit
// for the full pipeline with hinge refinement).
TrainTrace fit(Embedding& e, const SparseGraph& g, LossKind kind,
               const TrainConfig& cfg);

}  // namespace eed

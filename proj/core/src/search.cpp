#include "eed/search.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "eed/check.hpp"
#include "eed/rng.hpp"

namespace eed {

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() *
         Eigen::MatrixXd::Identity(m.rows(), std::min(m.rows(), m.cols()));
}

}  // namespace

SvdResult truncated_svd(const Eigen::MatrixXd& m, int d, std::uint64_t seed,
                        int oversample, int power_iters) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  const Eigen::Index min_dim = std::min(rows, cols);
  if (d < 1 || d > min_dim) {
    throw std::invalid_argument("svd rank must be in [1, min(rows, cols)]");
  }
  if (oversample < 0 || power_iters < 0) {
    throw std::invalid_argument("oversample and power_iters must be >= 0");
  }

  const Eigen::Index l = std::min<Eigen::Index>(d + oversample, min_dim);
  auto rng = substream(seed, "svd");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd omega(cols, l);
  for (Eigen::Index i = 0; i < cols; ++i) {
    for (Eigen::Index k = 0; k < l; ++k) omega(i, k) = gauss(rng);
  }

  Eigen::MatrixXd q = thin_q(m * omega);
  for (int t = 0; t < power_iters; ++t) {
    q = thin_q(m * thin_q(m.transpose() * q));
  }

  const Eigen::MatrixXd b = q.transpose() * m;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      b, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdResult res;
  res.u = q * svd.matrixU().leftCols(d);
  res.s = svd.singularValues().head(d);
  res.v = svd.matrixV().leftCols(d);
  return res;
}

Embedding warm_start(const Embedding& e, int d_new, std::uint64_t seed) {
  if (d_new < 1) throw std::invalid_argument("target dimension must be >= 1");
  const int n = e.num_nodes();
  const int d_old = e.dim();
  if (d_new == d_old) return e;

  Embedding out;
  out.model = e.model;
  out.bias = e.bias;

  if (d_new > d_old) {
    // Zero padding keeps existing logits; small noise in the new columns
    // breaks the saddle where their gradients vanish.
    out.x = Eigen::MatrixXd::Zero(n, d_new);
    out.y = Eigen::MatrixXd::Zero(n, d_new);
    out.x.leftCols(d_old) = e.x;
    out.y.leftCols(d_old) = e.y;
    auto rng = substream(seed, "pad");
    std::normal_distribution<double> gauss(0.0, 1e-2);
    for (int i = 0; i < n; ++i) {
      for (int k = d_old; k < d_new; ++k) out.x(i, k) = gauss(rng);
    }
    for (int i = 0; i < n; ++i) {
      for (int k = d_old; k < d_new; ++k) out.y(i, k) = gauss(rng);
    }
    return out;
  }

  Eigen::MatrixXd z(2 * n, d_old);
  z.topRows(n) = e.x;
  z.bottomRows(n) = e.y;
  if (e.model == ModelKind::L2) {
    // Distances are translation invariant, so center before projecting.
    const Eigen::RowVectorXd mu = z.colwise().mean();
    z.rowwise() -= mu;
  }
  const SvdResult svd = truncated_svd(z, d_new, seed);
  out.x = z.topRows(n) * svd.v;
  out.y = z.bottomRows(n) * svd.v;
  return out;
}

namespace {

struct TrialOutcome {
  bool exact = false;
  int epochs_used = 0;
  std::int64_t misclassified = 0;
  TrainTrace trace;
};

TrialOutcome run_trial(Embedding& e, const SparseGraph& g,
                       const SearchConfig& cfg) {
  TrialOutcome out;
  out.trace = fit(e, g, cfg.loss, cfg.train);
  out.exact = out.trace.exact;
  out.epochs_used = out.trace.epochs_used;
  out.misclassified = out.trace.final_misclassified;
  if (cfg.loss == LossKind::Hbdm && !out.exact) {
    RefineConfig rcfg;
    rcfg.inner_epochs = cfg.train.hinge_inner_epochs;
    rcfg.max_rounds = cfg.train.hinge_max_rounds;
    rcfg.lr0 = cfg.train.lr0;
    rcfg.lr_floor = cfg.train.lr_floor;
    rcfg.patience_k = cfg.train.patience_k;
    rcfg.seed = cfg.train.seed;
    const RefineResult refined = refine_hinge_active_set(e, g, 0.0, rcfg);
    out.exact = refined.exact;
    out.epochs_used += refined.epochs_used;
    if (!refined.misclassified_per_round.empty()) {
      out.misclassified = refined.misclassified_per_round.back();
    }
  }
  return out;
}

}  // namespace

SearchResult search_eed(const SparseGraph& g, const SearchConfig& cfg) {
  if (cfg.lb < 1 || cfg.lb >= cfg.ub) {
    throw std::invalid_argument("need 1 <= lb < ub");
  }

  SearchResult res;
  Embedding e =
      random_embedding(g.num_nodes(), cfg.ub, cfg.model, cfg.train.seed);
  TrialOutcome t = run_trial(e, g, cfg);
  res.trials.push_back({cfg.ub, t.exact, t.epochs_used, t.misclassified});
  if (!t.exact) {
    res.aborted_at_ub = true;
    return res;
  }
  res.d_star = cfg.ub;
  res.best = e;
  res.best_trace = t.trace;

  int lb = cfg.lb;
  int ub = cfg.ub - 1;
  std::uint64_t trial_index = 0;
  while (lb <= ub) {
    const int d = lb + (ub - lb) / 2;
    e = warm_start(*res.best, d,
                   cfg.train.seed ^ (0x9e3779b97f4a7c15ull * ++trial_index));
    t = run_trial(e, g, cfg);
    res.trials.push_back({d, t.exact, t.epochs_used, t.misclassified});
    if (t.exact) {
      res.d_star = d;
      res.best = e;
      res.best_trace = t.trace;
      if (d == lb) break;
      ub = d - 1;
    } else {
      if (d == ub) break;
      lb = d + 1;
    }
  }

  // Report nothing that has not survived an independent reconstruction scan.
  const CheckMethod verify =
      cfg.model == ModelKind::L2 && g.num_nodes() <= cfg.train.dense_cap
          ? CheckMethod::Dense
          : (cfg.model == ModelKind::L2 ? CheckMethod::KdTreeRadius
                                        : CheckMethod::Dense);
  const ActiveSet verified =
      compute_active_set(*res.best, g, verify, cfg.train.dense_cap);
  if (!verified.empty()) {
    throw std::runtime_error(
        "search produced an embedding that fails re-verification");
  }
  return res;
}

std::string search_result_to_json(const SearchResult& r,
                                  const SearchConfig& cfg,
                                  const std::string& embedding_path) {
  nlohmann::json j;
  j["d_star"] = nullptr;
  if (r.d_star) j["d_star"] = *r.d_star;
  j["aborted_at_ub"] = r.aborted_at_ub;
  j["config"] = {
      {"lb", cfg.lb},
      {"ub", cfg.ub},
      {"model", to_string(cfg.model)},
      {"loss", to_string(cfg.loss)},
      {"epochs", cfg.train.epochs},
      {"lr0", cfg.train.lr0},
      {"patience_k", cfg.train.patience_k},
      {"check_every", cfg.train.check_every},
      {"seed", cfg.train.seed},
  };
  j["trials"] = nlohmann::json::array();
  for (const TrialRecord& t : r.trials) {
    j["trials"].push_back({{"d", t.d},
                           {"exact", t.exact},
                           {"epochs_used", t.epochs_used},
                           {"misclassified", t.misclassified}});
  }
  j["embedding_path"] = nullptr;
  if (r.best && !embedding_path.empty()) j["embedding_path"] = embedding_path;
  return j.dump(2);
}

}  // namespace eed

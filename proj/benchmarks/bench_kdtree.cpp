#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "eed/check.hpp"
#include "eed/rng.hpp"

namespace {

Eigen::MatrixXd ball_points(int n, int d, std::uint64_t seed) {
  auto rng = eed::substream(seed, "bench_points");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  Eigen::MatrixXd p(n, d);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd dir(d);
    for (int c = 0; c < d; ++c) dir(c) = normal(rng);
    dir /= dir.norm();
    p.row(i) = dir * std::pow(unif(rng), 1.0 / d);
  }
  return p;
}

// Ball queries against the tree. The radius is small enough that result
// sets stay sparse, which is the regime the reconstruction check runs in.
void BM_KdTreeRadiusQuery(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd pts = ball_points(n, 3, 1);
  const eed::KdTree tree(pts);
  std::vector<std::pair<int, double>> hits;
  std::int64_t visited = 0, queries = 0;
  int q = 0;
  for (auto _ : state) {
    hits.clear();
    std::int64_t nodes = 0;
    tree.query_radius(pts, q, 0.2, &hits, &nodes);
    benchmark::DoNotOptimize(hits.data());
    visited += nodes;
    ++queries;
    q = (q + 1) % n;
  }
  state.counters["nodes_visited"] =
      benchmark::Counter(static_cast<double>(visited) / queries);
  state.SetComplexityN(n);
}
BENCHMARK(BM_KdTreeRadiusQuery)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)
    ->Complexity(benchmark::oLogN);

// The dense baseline the tree replaces: one pass over all points per query.
void BM_LinearRadiusScan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd pts = ball_points(n, 3, 1);
  std::vector<std::pair<int, double>> hits;
  int q = 0;
  for (auto _ : state) {
    hits.clear();
    for (int i = 0; i < n; ++i) {
      const double dist = eed::row_distance(pts, q, pts, i);
      if (dist <= 0.2) hits.emplace_back(i, dist);
    }
    benchmark::DoNotOptimize(hits.data());
    q = (q + 1) % n;
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_LinearRadiusScan)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)
    ->Complexity(benchmark::oN);

void BM_KdTreeBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd pts = ball_points(n, 3, 1);
  for (auto _ : state) {
    eed::KdTree tree(pts);
    benchmark::DoNotOptimize(&tree);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_KdTreeBuild)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)
    ->Complexity(benchmark::oNLogN);

}  // namespace

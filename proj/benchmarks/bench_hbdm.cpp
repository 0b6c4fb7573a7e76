#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "eed/graph.hpp"
#include "eed/hbdm.hpp"
#include "eed/loss.hpp"
#include "eed/optim.hpp"

namespace {

struct Instance {
  eed::SparseGraph graph;
  eed::Embedding embedding;
};

Instance clustered_instance(int n) {
  const int per_block = 4;
  const int blocks = n / per_block;
  Instance inst;
  inst.graph = eed::gen_block_graph(std::vector<int>(blocks, per_block),
                                    eed::BlockMode::Homophilous);
  inst.embedding = eed::random_embedding(n, 3, eed::ModelKind::L2, 7);
  return inst;
}

// Quadratic reference: every ordered dyad contributes.
void BM_LogisticLossFull(benchmark::State& state) {
  const Instance inst = clustered_instance(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const eed::LossGrad g =
        eed::logistic_loss_full(inst.embedding, inst.graph);
    benchmark::DoNotOptimize(g.value);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogisticLossFull)->RangeMultiplier(2)->Range(512, 8192)
    ->Complexity(benchmark::oNSquared);

// Hierarchical approximation on a fixed dendrogram; exact within leaves,
// centroid softplus across siblings.
void BM_HbdmLoss(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = clustered_instance(n);
  const eed::HbdmHierarchy h =
      eed::build_hierarchy(inst.embedding, eed::default_leaf_size(n), 3);
  for (auto _ : state) {
    const eed::LossGrad g =
        eed::hbdm_loss(inst.embedding, inst.graph, h);
    benchmark::DoNotOptimize(g.value);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HbdmLoss)->RangeMultiplier(2)->Range(512, 8192)
    ->Complexity(benchmark::oNLogN);

void BM_BuildHierarchy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = clustered_instance(n);
  for (auto _ : state) {
    const eed::HbdmHierarchy h =
        eed::build_hierarchy(inst.embedding, eed::default_leaf_size(n), 3);
    benchmark::DoNotOptimize(h.nodes.size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildHierarchy)->RangeMultiplier(2)->Range(512, 8192)
    ->Complexity(benchmark::oNLogN);

}  // namespace

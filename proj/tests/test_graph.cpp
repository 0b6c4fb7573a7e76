#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "eed/check.hpp"
#include "eed/graph.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("eed_graph_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string write_text(const TempDir& dir, const std::string& name,
                       const std::string& body) {
  const std::string p = dir.file(name);
  std::ofstream out(p);
  out << body;
  return p;
}

std::set<std::pair<int, int>> ordered_pairs(const eed::SparseGraph& g) {
  std::set<std::pair<int, int>> s;
  for (int i = 0; i < g.num_nodes(); ++i)
    for (int j : g.neighbors(i)) s.insert({i, j});
  return s;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("undirected edges are mirrored and deduplicated") {
  auto g = eed::SparseGraph::from_edges(3, {{0, 1}, {1, 0}, {0, 1}}, false,
                                        false);
  CHECK(g.num_ordered_links() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.out_degree(0) == 1);
  CHECK(g.out_degree(1) == 1);
  CHECK(g.out_degree(2) == 0);
}

TEST_CASE("directed edges keep orientation") {
  auto g = eed::SparseGraph::from_edges(3, {{0, 1}, {2, 1}}, true, false);
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(1, 0));
  CHECK(g.has_edge(2, 1));
  CHECK(g.num_ordered_links() == 2);
}

TEST_CASE("self loops are dropped unless enabled") {
  auto dropped =
      eed::SparseGraph::from_edges(2, {{0, 0}, {0, 1}}, false, false);
  CHECK(dropped.num_ordered_links() == 2);
  CHECK_FALSE(dropped.has_edge(0, 0));

  auto kept = eed::SparseGraph::from_edges(2, {{0, 0}, {0, 1}}, false, true);
  CHECK(kept.has_edge(0, 0));
  CHECK(kept.num_ordered_links() == 3);
}

TEST_CASE("out-of-range endpoints are rejected") {
  CHECK_THROWS_AS(eed::SparseGraph::from_edges(2, {{0, 2}}, false, false),
                  std::out_of_range);
  CHECK_THROWS_AS(eed::SparseGraph::from_edges(2, {{-1, 0}}, false, false),
                  std::out_of_range);
}

TEST_CASE("neighbor lists are sorted") {
  auto g = eed::SparseGraph::from_edges(5, {{0, 4}, {0, 2}, {0, 3}, {0, 1}},
                                        true, false);
  auto nb = g.neighbors(0);
  REQUIRE(nb.size() == 4);
  for (std::size_t k = 1; k < nb.size(); ++k) CHECK(nb[k - 1] < nb[k]);
}

TEST_CASE("edge list loading compacts ids in sorted order") {
  TempDir dir;
  auto p = write_text(dir, "g.txt",
                      "# comment line\n"
                      "% another comment\n"
                      "10 30\n"
                      "30 20\n"
                      "\n"
                      "10 20 1.5\n");
  std::vector<std::int64_t> ids;
  auto g = eed::load_edge_list(p, false, false, &ids);
  CHECK(g.num_nodes() == 3);
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == 10);
  CHECK(ids[1] == 20);
  CHECK(ids[2] == 30);
  CHECK(g.has_edge(0, 2));  // 10-30
  CHECK(g.has_edge(2, 1));  // 30-20
  CHECK(g.has_edge(0, 1));  // 10-20
  CHECK(g.num_ordered_links() == 6);
}

TEST_CASE("edge list parse errors carry line numbers") {
  TempDir dir;

  auto one_token = write_text(dir, "one.txt", "1 2\n3\n");
  try {
    eed::load_edge_list(one_token, false, false);
    FAIL("expected parse failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  auto bad_extra = write_text(dir, "extra.txt", "1 2 weight\n");
  try {
    eed::load_edge_list(bad_extra, false, false);
    FAIL("expected parse failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }

  auto empty = write_text(dir, "empty.txt", "# nothing\n");
  CHECK_THROWS_AS(eed::load_edge_list(empty, false, false),
                  std::runtime_error);

  CHECK_THROWS_AS(eed::load_edge_list(dir.file("missing.txt"), false, false),
                  std::runtime_error);
}

TEST_CASE("edge list round trip preserves the graph") {
  TempDir dir;
  auto g = eed::gen_block_graph({3, 4}, eed::BlockMode::Homophilous);
  eed::write_edge_list(g, dir.file("rt.txt"));
  auto g2 = eed::load_edge_list(dir.file("rt.txt"), false, false);
  CHECK(ordered_pairs(g) == ordered_pairs(g2));
}

TEST_CASE("homophilous blocks link exactly within blocks") {
  auto g = eed::gen_block_graph({2, 2}, eed::BlockMode::Homophilous);
  auto got = ordered_pairs(g);
  std::set<std::pair<int, int>> want = {{0, 1}, {1, 0}, {2, 3}, {3, 2}};
  CHECK(got == want);
}

TEST_CASE("heterophilous blocks link exactly across blocks") {
  auto g = eed::gen_block_graph({2, 2}, eed::BlockMode::Heterophilous);
  auto got = ordered_pairs(g);
  std::set<std::pair<int, int>> want = {{0, 2}, {0, 3}, {1, 2}, {1, 3},
                                        {2, 0}, {3, 0}, {2, 1}, {3, 1}};
  CHECK(got == want);
}

TEST_CASE("block generator rejects empty or degenerate inputs") {
  CHECK_THROWS_AS(eed::gen_block_graph({}, eed::BlockMode::Homophilous),
                  std::invalid_argument);
  CHECK_THROWS_AS(eed::gen_block_graph({3, 0}, eed::BlockMode::Homophilous),
                  std::invalid_argument);
}

TEST_CASE("geometric generator is deterministic and in the unit ball") {
  auto a = eed::gen_geometric(40, 3, 0.5, 123);
  auto b = eed::gen_geometric(40, 3, 0.5, 123);
  CHECK(a.truth.x == b.truth.x);
  CHECK(ordered_pairs(a.graph) == ordered_pairs(b.graph));

  for (int i = 0; i < 40; ++i) CHECK(a.truth.x.row(i).norm() <= 1.0 + 1e-12);
  CHECK(a.truth.model == eed::ModelKind::L2);
  CHECK(a.truth.bias == doctest::Approx(0.5));
  CHECK(a.truth.x == a.truth.y);
}

TEST_CASE("geometric truth embedding reconstructs its own graph") {
  auto gg = eed::gen_geometric(60, 3, 0.4, 7);
  auto active = eed::compute_active_set(gg.truth, gg.graph);
  CHECK(active.empty());
}

TEST_CASE("geometric generator validates arguments") {
  CHECK_THROWS_AS(eed::gen_geometric(1, 3, 0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(eed::gen_geometric(5, 0, 0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(eed::gen_geometric(5, 3, 0.0, 0), std::invalid_argument);
}

TEST_CASE("stochastic geometric differs across seeds but not draws") {
  auto a = eed::gen_geometric(60, 2, 1.0, 5, true);
  auto b = eed::gen_geometric(60, 2, 1.0, 5, true);
  CHECK(ordered_pairs(a.graph) == ordered_pairs(b.graph));
  auto c = eed::gen_geometric(60, 2, 1.0, 6, true);
  CHECK(ordered_pairs(a.graph) != ordered_pairs(c.graph));
}

TEST_CASE("stats of a 4-cycle") {
  auto g = eed::SparseGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}},
                                        false, false);
  auto s = eed::graph_stats(g);
  CHECK(s.avg_degree == doctest::Approx(2.0));
  CHECK(s.max_degree == 2);
  CHECK(s.triangles == 0);
  CHECK(s.components == 1);
  // Paths from any node: 0, 1, 1, 2 -> mean over reachable others = 4/3.
  CHECK(s.avg_shortest_path == doctest::Approx(4.0 / 3.0));
  CHECK(s.density == doctest::Approx(8.0 / 12.0));
}

TEST_CASE("complete graph triangle count") {
  for (int m : {3, 4, 5, 6}) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) edges.push_back({i, j});
    auto g = eed::SparseGraph::from_edges(m, edges, false, false);
    auto s = eed::graph_stats(g);
    CHECK(s.triangles == static_cast<std::int64_t>(m) * (m - 1) * (m - 2) / 6);
    CHECK(s.density == doctest::Approx(1.0));
  }
}

TEST_CASE("components and isolated nodes") {
  auto g = eed::SparseGraph::from_edges(5, {{0, 1}, {2, 3}}, false, false);
  auto s = eed::graph_stats(g);
  CHECK(s.components == 3);
  CHECK(s.max_degree == 1);
  // Giant component is a single edge; only path length 1 exists.
  CHECK(s.avg_shortest_path == doctest::Approx(1.0));
}

}  // TEST_SUITE

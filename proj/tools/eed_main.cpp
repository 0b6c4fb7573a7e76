#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eed/check.hpp"
#include "eed/embedding.hpp"
#include "eed/graph.hpp"
#include "eed/hbdm.hpp"
#include "eed/loss.hpp"
#include "eed/optim.hpp"
#include "eed/rng.hpp"
#include "eed/search.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitSuccess = 0;
constexpr int kExitFailure = 1;  // operation ran but did not succeed
constexpr int kExitUsage = 2;    // bad flags, bad files, invalid combinations

std::uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// One manifest per run: command, echoed config, input digests, outputs and
// wall time, so a run can be reproduced from the file alone.
class ManifestWriter {
 public:
  ManifestWriter(std::string command, json config)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = kVersion;
    doc_["config"] = std::move(config);
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::array();
  }

  void add_input(const std::string& path) {
    doc_["inputs"][path] = hex64(file_digest(path));
  }
  void add_output(const std::string& path) { doc_["outputs"].push_back(path); }

  void write(const std::string& path) {
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start_;
    doc_["wall_clock_seconds"] = elapsed.count();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << doc_.dump(2) << '\n';
  }

 private:
  std::chrono::steady_clock::time_point start_;
  json doc_;
};

struct GraphFlags {
  bool directed = false;
  bool self_loops = false;
};

void add_graph_flags(CLI::App* cmd, GraphFlags* gf) {
  cmd->add_flag("--directed", gf->directed,
                "Treat the edge list as directed (default: undirected)");
  cmd->add_flag("--self-loops", gf->self_loops,
                "Keep self loops and model the diagonal");
}

struct TrainFlags {
  eed::TrainConfig cfg;
  void add_to(CLI::App* cmd) {
    cmd->add_option("--epochs", cfg.epochs, "Epoch budget per trial");
    cmd->add_option("--lr", cfg.lr0, "Initial learning rate");
    cmd->add_option("--patience", cfg.patience_k,
                    "Epochs without improvement before halving the rate");
    cmd->add_option("--check-every", cfg.check_every,
                    "Reconstruction check cadence in epochs");
    cmd->add_option("--lr-floor", cfg.lr_floor,
                    "Stop once the learning rate falls below this");
    cmd->add_option("--dense-cap", cfg.dense_cap,
                    "Largest node count the dense check will scan");
    cmd->add_option("--rn-batch", cfg.rn_batch,
                    "Node batch for the rn loss (0 = min(n, 1024))");
    cmd->add_option("--cc-k", cfg.cc_k,
                    "Non-link draws per link for the cc loss");
    cmd->add_option("--hbdm-refresh", cfg.hbdm_refresh,
                    "Epochs between hierarchy rebuilds");
    cmd->add_option("--hinge-inner", cfg.hinge_inner_epochs,
                    "Hinge epochs per active-set round");
    cmd->add_option("--hinge-rounds", cfg.hinge_max_rounds,
                    "Active-set rounds before giving up");
  }
};

json train_config_json(const eed::TrainConfig& t) {
  return json{{"epochs", t.epochs},
              {"lr", t.lr0},
              {"patience", t.patience_k},
              {"check_every", t.check_every},
              {"lr_floor", t.lr_floor},
              {"dense_cap", t.dense_cap},
              {"rn_batch", t.rn_batch},
              {"cc_k", t.cc_k},
              {"hbdm_refresh", t.hbdm_refresh},
              {"hinge_inner", t.hinge_inner_epochs},
              {"hinge_rounds", t.hinge_max_rounds},
              {"seed", t.seed}};
}

std::vector<std::pair<int, int>> predicted_edges(const eed::Embedding& e,
                                                 bool self_loops,
                                                 int dense_cap) {
  const int n = e.num_nodes();
  std::vector<std::pair<int, int>> edges;
  if (e.model == eed::ModelKind::L2) {
    eed::KdTree tree(e.y);
    std::vector<std::pair<int, double>> ball;
    for (int i = 0; i < n; ++i) {
      tree.query_radius(e.x, i, e.bias, &ball);
      for (const auto& [j, dist] : ball) {
        if (i == j && !self_loops) continue;
        if (dist < e.bias) edges.emplace_back(i, j);  // strict: logit > 0
      }
    }
    return edges;
  }
  if (n > dense_cap) {
    throw std::invalid_argument(
        "prediction for dot-product models scans all dyads; node count "
        "exceeds --dense-cap");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j && !self_loops) continue;
      if (e.logit(i, j) > 0.0) edges.emplace_back(i, j);
    }
  }
  return edges;
}

std::string quote_arg(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

// ---------------------------------------------------------------- search --

struct SearchArgs {
  std::string graph_path;
  GraphFlags gf;
  std::string model = "l2";
  std::string loss = "full";
  int lb = 1;
  int ub = 64;
  TrainFlags train;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;  // multi-seed fan-out
  int jobs = 1;
  std::string out_dir;
};

int run_search_single(const SearchArgs& a) {
  eed::SearchConfig cfg;
  cfg.lb = a.lb;
  cfg.ub = a.ub;
  cfg.model = eed::model_kind_from_string(a.model);
  cfg.loss = eed::loss_kind_from_string(a.loss);
  cfg.train = a.train.cfg;
  cfg.train.seed = a.seed;

  json config_echo{{"graph", a.graph_path},
                   {"directed", a.gf.directed},
                   {"self_loops", a.gf.self_loops},
                   {"model", a.model},
                   {"loss", a.loss},
                   {"lb", a.lb},
                   {"ub", a.ub},
                   {"train", train_config_json(cfg.train)}};
  ManifestWriter manifest("search", config_echo);
  manifest.add_input(a.graph_path);

  const eed::SparseGraph g =
      eed::load_edge_list(a.graph_path, a.gf.directed, a.gf.self_loops);

  fs::create_directories(a.out_dir);
  const std::string embedding_path =
      (fs::path(a.out_dir) / "embedding.eed").string();

  const eed::SearchResult res = eed::search_eed(g, cfg);

  const std::string result_path =
      (fs::path(a.out_dir) / "result.json").string();
  {
    std::ofstream out(result_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + result_path);
    out << eed::search_result_to_json(res, cfg, res.best ? embedding_path : "")
        << '\n';
  }
  manifest.add_output(result_path);

  if (res.best) {
    eed::save_embedding(*res.best, embedding_path);
    manifest.add_output(embedding_path);
    const std::string active_path =
        (fs::path(a.out_dir) / "activeset.csv").string();
    eed::write_active_set_csv(eed::compute_active_set(*res.best, g,
                                                      eed::CheckMethod::Auto,
                                                      cfg.train.dense_cap),
                              active_path);
    manifest.add_output(active_path);
  }
  if (res.best_trace) {
    const std::string trace_path =
        (fs::path(a.out_dir) / "trace.csv").string();
    eed::write_trace_csv(*res.best_trace, trace_path);
    manifest.add_output(trace_path);
  }
  manifest.write((fs::path(a.out_dir) / "manifest.json").string());

  if (res.aborted_at_ub) {
    std::cerr << "no exact embedding found at ub=" << a.ub
              << "; widen the range or raise --epochs\n";
    return kExitFailure;
  }
  std::cout << "d_star: " << *res.d_star << '\n';
  // Last trained loss if the winning trial ran epochs; a warm start can be
  // exact immediately, in which case evaluate the solution it reported.
  std::optional<double> sum;
  if (res.best_trace && !res.best_trace->rows.empty()) {
    sum = res.best_trace->rows.back().loss;
  } else if (res.best && g.num_nodes() <= cfg.train.dense_cap) {
    sum = eed::logistic_loss_full(*res.best, g).value;
  }
  if (sum) {
    const double dyads =
        static_cast<double>(g.num_nodes()) *
        (a.gf.self_loops ? g.num_nodes() : g.num_nodes() - 1);
    std::cout << "final_loss_sum: " << *sum << '\n';
    std::cout << "final_loss_per_dyad: " << (dyads > 0 ? *sum / dyads : 0.0)
              << '\n';
  }
  return kExitSuccess;
}

int run_search_fanout(const SearchArgs& a, const std::string& self_exe) {
  fs::create_directories(a.out_dir);
  json config_echo{{"graph", a.graph_path},
                   {"seeds", a.seeds},
                   {"jobs", a.jobs},
                   {"model", a.model},
                   {"loss", a.loss}};
  ManifestWriter manifest("search-fanout", config_echo);
  manifest.add_input(a.graph_path);

  std::vector<std::string> run_dirs;
  std::vector<std::string> commands;
  for (std::uint64_t s : a.seeds) {
    const std::string dir =
        (fs::path(a.out_dir) / ("seed_" + std::to_string(s))).string();
    run_dirs.push_back(dir);
    std::ostringstream cmd;
    cmd << quote_arg(self_exe) << " search " << quote_arg(a.graph_path);
    if (a.gf.directed) cmd << " --directed";
    if (a.gf.self_loops) cmd << " --self-loops";
    cmd << " --model " << a.model << " --loss " << a.loss << " --lb " << a.lb
        << " --ub " << a.ub << " --epochs " << a.train.cfg.epochs << " --lr "
        << a.train.cfg.lr0 << " --patience " << a.train.cfg.patience_k
        << " --check-every " << a.train.cfg.check_every << " --lr-floor "
        << a.train.cfg.lr_floor << " --dense-cap " << a.train.cfg.dense_cap
        << " --rn-batch " << a.train.cfg.rn_batch << " --cc-k "
        << a.train.cfg.cc_k << " --hbdm-refresh " << a.train.cfg.hbdm_refresh
        << " --hinge-inner " << a.train.cfg.hinge_inner_epochs
        << " --hinge-rounds " << a.train.cfg.hinge_max_rounds << " --seed "
        << s << " --out " << quote_arg(dir);
    commands.push_back(cmd.str());
  }

  // Independent seeds run as separate processes, round-robined over --jobs
  // worker threads; nothing is shared but the filesystem.
  const int jobs = std::max(1, a.jobs);
  std::vector<std::thread> workers;
  std::vector<int> codes(commands.size(), -1);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w]() {
      for (std::size_t t = static_cast<std::size_t>(w); t < commands.size();
           t += static_cast<std::size_t>(jobs)) {
        codes[t] = std::system(commands[t].c_str());
      }
    });
  }
  for (auto& t : workers) t.join();

  json summary;
  summary["seeds"] = json::array();
  std::optional<int> best_d;
  for (std::size_t t = 0; t < a.seeds.size(); ++t) {
    json row{{"seed", a.seeds[t]}, {"out", run_dirs[t]}};
    row["d_star"] = nullptr;
    const fs::path result = fs::path(run_dirs[t]) / "result.json";
    if (fs::exists(result)) {
      std::ifstream in(result);
      json r = json::parse(in, nullptr, false);
      if (!r.is_discarded() && r.contains("d_star") && !r["d_star"].is_null()) {
        const int d = r["d_star"].get<int>();
        row["d_star"] = d;
        if (!best_d || d < *best_d) best_d = d;
      }
    }
    summary["seeds"].push_back(std::move(row));
  }
  summary["d_star_min"] = nullptr;
  if (best_d) summary["d_star_min"] = *best_d;

  const std::string summary_path =
      (fs::path(a.out_dir) / "summary.json").string();
  {
    std::ofstream out(summary_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + summary_path);
    out << summary.dump(2) << '\n';
  }
  manifest.add_output(summary_path);
  manifest.write((fs::path(a.out_dir) / "manifest.json").string());

  if (!best_d) {
    std::cerr << "no seed reached an exact embedding\n";
    return kExitFailure;
  }
  std::cout << "d_star_min: " << *best_d << '\n';
  return kExitSuccess;
}

// ----------------------------------------------------------------- check --

struct CheckArgs {
  std::string embedding_path;
  std::string graph_path;
  GraphFlags gf;
  std::string method = "auto";
  int dense_cap = 20000;
  std::string active_out;
  std::string out_dir;
};

int run_check(const CheckArgs& a) {
  ManifestWriter manifest("check", json{{"embedding", a.embedding_path},
                                        {"graph", a.graph_path},
                                        {"method", a.method},
                                        {"dense_cap", a.dense_cap}});
  manifest.add_input(a.embedding_path);
  manifest.add_input(a.graph_path);

  const eed::Embedding e = eed::load_embedding(a.embedding_path);
  const eed::SparseGraph g =
      eed::load_edge_list(a.graph_path, a.gf.directed, a.gf.self_loops);
  if (e.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument(
        "embedding has " + std::to_string(e.num_nodes()) + " nodes but the graph has " +
        std::to_string(g.num_nodes()));
  }

  eed::CheckMethod method = eed::CheckMethod::Auto;
  if (a.method == "dense") {
    method = eed::CheckMethod::Dense;
  } else if (a.method == "kdtree") {
    method = eed::CheckMethod::KdTreeRadius;
  } else if (a.method != "auto") {
    throw std::invalid_argument("unknown method '" + a.method +
                                "' (expected dense, kdtree, or auto)");
  }

  std::optional<double> frob;
  eed::ActiveSet active;
  if (method == eed::CheckMethod::Dense) {
    const eed::DenseCheckResult r = eed::dense_check(e, g, a.dense_cap);
    frob = r.frobenius_rel_error;
    active = r.active;
  } else {
    active = eed::compute_active_set(e, g, method, a.dense_cap);
  }

  std::cout << "checked dyads: " << active.total_dyads << '\n';
  std::cout << "misclassified: " << active.misclassified() << '\n';
  std::cout << "fraction: "
            << (active.total_dyads > 0
                    ? static_cast<double>(active.misclassified()) /
                          static_cast<double>(active.total_dyads)
                    : 0.0)
            << '\n';
  if (frob) std::cout << "frobenius_rel_error: " << *frob << '\n';
  std::cout << (active.empty() ? "exact: yes" : "exact: no") << '\n';

  if (!a.active_out.empty()) {
    eed::write_active_set_csv(active, a.active_out);
    manifest.add_output(a.active_out);
  }
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    const std::string active_path =
        (fs::path(a.out_dir) / "activeset.csv").string();
    eed::write_active_set_csv(active, active_path);
    manifest.add_output(active_path);
    manifest.write((fs::path(a.out_dir) / "manifest.json").string());
  }
  return active.empty() ? kExitSuccess : kExitFailure;
}

// -------------------------------------------------------------- generate --

struct GenerateBlocksArgs {
  std::vector<int> sizes;
  std::string mode = "homophilous";
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_generate_blocks(const GenerateBlocksArgs& a) {
  eed::BlockMode mode;
  if (a.mode == "homophilous") {
    mode = eed::BlockMode::Homophilous;
  } else if (a.mode == "heterophilous") {
    mode = eed::BlockMode::Heterophilous;
  } else {
    throw std::invalid_argument("unknown mode '" + a.mode +
                                "' (expected homophilous or heterophilous)");
  }
  ManifestWriter manifest(
      "generate-blocks",
      json{{"sizes", a.sizes}, {"mode", a.mode}, {"seed", a.seed}});
  const eed::SparseGraph g = eed::gen_block_graph(a.sizes, mode, a.seed);
  fs::create_directories(a.out_dir);
  const std::string graph_path = (fs::path(a.out_dir) / "graph.edges").string();
  eed::write_edge_list(g, graph_path);
  manifest.add_output(graph_path);
  manifest.write((fs::path(a.out_dir) / "manifest.json").string());
  std::cout << "wrote " << graph_path << " (" << g.num_nodes() << " nodes, "
            << g.num_ordered_links() << " ordered links)\n";
  return kExitSuccess;
}

struct GenerateGeometricArgs {
  int n = 100;
  int dim = 2;
  double bias = 0.5;
  bool stochastic = false;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_generate_geometric(const GenerateGeometricArgs& a) {
  ManifestWriter manifest("generate-geometric",
                          json{{"n", a.n},
                               {"dim", a.dim},
                               {"bias", a.bias},
                               {"stochastic", a.stochastic},
                               {"seed", a.seed}});
  const eed::GeometricGraph gg =
      eed::gen_geometric(a.n, a.dim, a.bias, a.seed, a.stochastic);
  fs::create_directories(a.out_dir);
  const std::string graph_path = (fs::path(a.out_dir) / "graph.edges").string();
  const std::string truth_path = (fs::path(a.out_dir) / "truth.eed").string();
  eed::write_edge_list(gg.graph, graph_path);
  eed::save_embedding(gg.truth, truth_path);
  manifest.add_output(graph_path);
  manifest.add_output(truth_path);
  manifest.write((fs::path(a.out_dir) / "manifest.json").string());
  std::cout << "wrote " << graph_path << " (" << gg.graph.num_nodes()
            << " nodes, " << gg.graph.num_ordered_links()
            << " ordered links) and " << truth_path << '\n';
  return kExitSuccess;
}

// ----------------------------------------------------------------- stats --

struct StatsArgs {
  std::string graph_path;
  GraphFlags gf;
  std::string embedding_path;
  bool reconstructed = false;
  std::vector<int> dims;
  int path_sample = 100;
  int dense_cap = 20000;
  std::uint64_t seed = 0;
  std::string out_dir;
};

void append_stats_row(std::ostream& out, const std::string& variant,
                      const std::string& d, const eed::SparseGraph& g,
                      const eed::GraphStats& s) {
  out << variant << ',' << d << ',' << g.num_nodes() << ','
      << g.num_ordered_links() << ',' << s.avg_degree << ',' << s.density
      << ',' << s.max_degree << ',' << s.triangles << ',' << s.components
      << ',' << s.avg_shortest_path << '\n';
}

int run_stats(const StatsArgs& a) {
  ManifestWriter manifest("stats", json{{"graph", a.graph_path},
                                        {"embedding", a.embedding_path},
                                        {"reconstructed", a.reconstructed},
                                        {"dims", a.dims},
                                        {"path_sample", a.path_sample},
                                        {"seed", a.seed}});
  manifest.add_input(a.graph_path);
  const eed::SparseGraph g =
      eed::load_edge_list(a.graph_path, a.gf.directed, a.gf.self_loops);

  if ((a.reconstructed || !a.dims.empty()) && a.embedding_path.empty()) {
    throw std::invalid_argument(
        "--reconstructed and --dims require --embedding");
  }

  std::ostringstream csv;
  csv << "variant,d,n,ordered_links,avg_degree,density,max_degree,triangles,"
         "components,avg_shortest_path\n";
  append_stats_row(csv, "true", "-", g, graph_stats(g, a.path_sample, a.seed));

  if (!a.embedding_path.empty()) {
    manifest.add_input(a.embedding_path);
    const eed::Embedding e = eed::load_embedding(a.embedding_path);
    if (e.num_nodes() != g.num_nodes()) {
      throw std::invalid_argument("embedding and graph node counts differ");
    }
    std::vector<int> dims = a.dims;
    if (dims.empty() && a.reconstructed) dims.push_back(e.dim());
    for (std::size_t t = 0; t < dims.size(); ++t) {
      const int d = dims[t];
      if (d < 1) throw std::invalid_argument("dims must be >= 1");
      const eed::Embedding ed =
          d == e.dim() ? e : eed::warm_start(e, d, a.seed + t);
      const eed::SparseGraph pg = eed::SparseGraph::from_edges(
          g.num_nodes(),
          predicted_edges(ed, a.gf.self_loops, a.dense_cap), true,
          a.gf.self_loops);
      append_stats_row(csv, "reconstructed", std::to_string(d), pg,
                       graph_stats(pg, a.path_sample, a.seed));
    }
  }

  std::cout << csv.str();
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    const std::string csv_path = (fs::path(a.out_dir) / "stats.csv").string();
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + csv_path);
    out << csv.str();
    manifest.add_output(csv_path);
    manifest.write((fs::path(a.out_dir) / "manifest.json").string());
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact embedding dimension toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SearchArgs sa;
  CLI::App* search = app.add_subcommand(
      "search", "Binary-search the smallest rank with exact reconstruction");
  search->add_option("graph", sa.graph_path, "Edge list path")->required();
  add_graph_flags(search, &sa.gf);
  search->add_option("--model", sa.model, "lpca, eig, or l2");
  search->add_option("--loss", sa.loss, "full, rn, cc, or hbdm");
  search->add_option("--lb", sa.lb, "Smallest rank to consider");
  search->add_option("--ub", sa.ub, "Largest rank to consider");
  sa.train.add_to(search);
  search->add_option("--seed", sa.seed, "Root seed for all substreams");
  search->add_option("--seeds", sa.seeds,
                     "Run one search per seed (fans out as processes)");
  search->add_option("--jobs", sa.jobs, "Concurrent processes for --seeds");
  search->add_option("--out", sa.out_dir, "Output directory")->required();

  CheckArgs ca;
  CLI::App* check = app.add_subcommand(
      "check", "Count misclassified dyads of a stored embedding");
  check->add_option("embedding", ca.embedding_path, "Embedding file")
      ->required();
  check->add_option("graph", ca.graph_path, "Edge list path")->required();
  add_graph_flags(check, &ca.gf);
  check->add_option("--method", ca.method, "dense, kdtree, or auto");
  check->add_option("--dense-cap", ca.dense_cap,
                    "Largest node count the dense scan accepts");
  check->add_option("--active-out", ca.active_out,
                    "Write the active set CSV to this path");
  check->add_option("--out", ca.out_dir,
                    "Optional output directory (manifest + active set)");

  CLI::App* generate =
      app.add_subcommand("generate", "Write synthetic benchmark graphs");
  generate->require_subcommand(1);
  GenerateBlocksArgs ba;
  CLI::App* blocks = generate->add_subcommand(
      "blocks", "Deterministic planted-partition graph");
  blocks->add_option("--sizes", ba.sizes, "Block sizes, e.g. --sizes 10 10 10")
      ->required();
  blocks->add_option("--mode", ba.mode, "homophilous or heterophilous");
  blocks->add_option("--seed", ba.seed, "Recorded in the manifest");
  blocks->add_option("--out", ba.out_dir, "Output directory")->required();
  GenerateGeometricArgs ga;
  CLI::App* geometric = generate->add_subcommand(
      "geometric", "Random points in the unit ball, linked within a radius");
  geometric->add_option("--n", ga.n, "Point count")->required();
  geometric->add_option("--dim", ga.dim, "Latent dimension")->required();
  geometric->add_option("--bias", ga.bias, "Link radius (and stored bias)");
  geometric->add_flag("--stochastic", ga.stochastic,
                      "Link with probability sigmoid(bias - distance)");
  geometric->add_option("--seed", ga.seed, "Sampling seed");
  geometric->add_option("--out", ga.out_dir, "Output directory")->required();

  StatsArgs ta;
  CLI::App* stats = app.add_subcommand(
      "stats", "Structural statistics of a graph or its reconstruction");
  stats->add_option("graph", ta.graph_path, "Edge list path")->required();
  add_graph_flags(stats, &ta.gf);
  stats->add_option("--embedding", ta.embedding_path,
                    "Embedding whose predictions to analyze");
  stats->add_flag("--reconstructed", ta.reconstructed,
                  "Also report stats of the predicted graph");
  stats->add_option("--dims", ta.dims,
                    "Project the embedding to each rank and report stats");
  stats->add_option("--path-sample", ta.path_sample,
                    "BFS sources for the average shortest path");
  stats->add_option("--dense-cap", ta.dense_cap,
                    "Largest node count scanned for dot-product predictions");
  stats->add_option("--seed", ta.seed, "Seed for sampled statistics");
  stats->add_option("--out", ta.out_dir, "Optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (*search) {
      if (!sa.seeds.empty()) {
        return run_search_fanout(sa, fs::read_symlink("/proc/self/exe"));
      }
      return run_search_single(sa);
    }
    if (*check) return run_check(ca);
    if (*generate) {
      if (*blocks) return run_generate_blocks(ba);
      return run_generate_geometric(ga);
    }
    if (*stats) return run_stats(ta);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

struct CliFixture {
  fs::path dir;
  int run_id = 0;

  CliFixture() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("eed_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~CliFixture() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  std::string path(const std::string& name) const {
    return (dir / name).string();
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  RunResult run(const std::string& args) {
    const std::string out_file = path("stdout_" + std::to_string(run_id));
    const std::string err_file = path("stderr_" + std::to_string(run_id));
    ++run_id;
    const std::string cmd = std::string("'") + EED_CLI_PATH + "' " + args +
                            " > '" + out_file + "' 2> '" + err_file + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
  }
};

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and usage exits") {
  CliFixture cli;
  CHECK(cli.run("--version").code == 0);
  CHECK(cli.run("").code == 2);             // a subcommand is required
  CHECK(cli.run("frobnicate").code == 2);   // unknown subcommand
  CHECK(cli.run("check --embedding").code == 2);
}

TEST_CASE("generate blocks writes the graph and manifest") {
  CliFixture cli;
  auto r = cli.run("generate blocks --sizes 10 10 10 --out '" +
                   cli.path("blocks") + "'");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "30 nodes"));
  CHECK(contains(r.out, "270 ordered links"));
  CHECK(fs::exists(cli.path("blocks/graph.edges")));
  REQUIRE(fs::exists(cli.path("blocks/manifest.json")));
  auto manifest = nlohmann::json::parse(
      CliFixture::slurp(cli.path("blocks/manifest.json")));
  CHECK(manifest["command"] == "generate-blocks");
  CHECK(manifest["config"]["mode"] == "homophilous");
  CHECK(manifest.contains("wall_clock_seconds"));

  CHECK(cli.run("generate blocks --sizes 3 --mode sideways --out '" +
                cli.path("bad") + "'")
            .code == 2);
}

TEST_CASE("generated geometric truth verifies as exact") {
  CliFixture cli;
  auto gen = cli.run(
      "generate geometric --n 30 --dim 2 --bias 0.9 --seed 5 --out '" +
      cli.path("geo") + "'");
  REQUIRE(gen.code == 0);
  REQUIRE(fs::exists(cli.path("geo/graph.edges")));
  REQUIRE(fs::exists(cli.path("geo/truth.eed")));

  auto chk = cli.run("check '" + cli.path("geo/truth.eed") + "' '" +
                     cli.path("geo/graph.edges") + "'");
  CHECK(chk.code == 0);
  CHECK(contains(chk.out, "misclassified: 0"));
  CHECK(contains(chk.out, "exact: yes"));
}

TEST_CASE("check distinguishes usage errors from non-exactness") {
  CliFixture cli;
  auto gen = cli.run(
      "generate geometric --n 12 --dim 2 --bias 1.2 --seed 9 --out '" +
      cli.path("geo") + "'");
  REQUIRE(gen.code == 0);
  auto blocks = cli.run("generate blocks --sizes 6 6 --out '" +
                        cli.path("blocks") + "'");
  REQUIRE(blocks.code == 0);

  // Missing input file: usage error.
  CHECK(cli.run("check '" + cli.path("nope.eed") + "' '" +
                cli.path("geo/graph.edges") + "'")
            .code == 2);

  // Mismatched node counts: usage error.
  auto small = cli.run(
      "generate geometric --n 8 --dim 2 --bias 1.2 --seed 9 --out '" +
      cli.path("small") + "'");
  REQUIRE(small.code == 0);
  CHECK(cli.run("check '" + cli.path("small/truth.eed") + "' '" +
                cli.path("blocks/graph.edges") + "'")
            .code == 2);

  // Dense scan refused above the cap: usage error with guidance.
  auto capped = cli.run("check '" + cli.path("geo/truth.eed") + "' '" +
                        cli.path("geo/graph.edges") +
                        "' --method dense --dense-cap 5");
  CHECK(capped.code == 2);
  CHECK(contains(capped.err, "kdtree"));

  // Wrong-model embedding for this graph: runs fine, reports non-exact.
  auto wrong = cli.run("check '" + cli.path("geo/truth.eed") + "' '" +
                       cli.path("blocks/graph.edges") + "'");
  CHECK(wrong.code == 1);
  CHECK(contains(wrong.out, "exact: no"));
}

TEST_CASE("dense and tree methods report identical counts") {
  CliFixture cli;
  REQUIRE(cli.run(
                 "generate geometric --n 12 --dim 2 --bias 1.2 --seed 3 "
                 "--out '" +
                 cli.path("geo") + "'")
              .code == 0);
  REQUIRE(cli.run("generate blocks --sizes 6 6 --out '" + cli.path("blocks") +
                  "'")
              .code == 0);

  auto dense = cli.run("check '" + cli.path("geo/truth.eed") + "' '" +
                       cli.path("blocks/graph.edges") + "' --method dense");
  auto tree = cli.run("check '" + cli.path("geo/truth.eed") + "' '" +
                      cli.path("blocks/graph.edges") + "' --method kdtree");
  CHECK(dense.code == tree.code);

  auto line_of = [](const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
      if (line.rfind(key, 0) == 0) return line;
    return std::string();
  };
  CHECK(line_of(dense.out, "misclassified:") ==
        line_of(tree.out, "misclassified:"));
  CHECK(line_of(dense.out, "checked dyads:") ==
        line_of(tree.out, "checked dyads:"));
  CHECK(contains(dense.out, "frobenius_rel_error:"));

  // The active set CSV also matches dyad for dyad.
  auto d2 = cli.run("check '" + cli.path("geo/truth.eed") + "' '" +
                    cli.path("blocks/graph.edges") +
                    "' --method dense --active-out '" + cli.path("a.csv") +
                    "'");
  auto t2 = cli.run("check '" + cli.path("geo/truth.eed") + "' '" +
                    cli.path("blocks/graph.edges") +
                    "' --method kdtree --active-out '" + cli.path("b.csv") +
                    "'");
  CHECK(CliFixture::slurp(cli.path("a.csv")) ==
        CliFixture::slurp(cli.path("b.csv")));
}

TEST_CASE("search writes results and the embedding passes check") {
  CliFixture cli;
  REQUIRE(cli.run("generate blocks --sizes 6 6 --out '" + cli.path("blocks") +
                  "'")
              .code == 0);
  auto s = cli.run("search '" + cli.path("blocks/graph.edges") +
                   "' --model l2 --lb 1 --ub 4 --epochs 3000 "
                   "--check-every 50 --seed 1 --out '" +
                   cli.path("run") + "'");
  REQUIRE(s.code == 0);
  CHECK(contains(s.out, "d_star: 1"));
  CHECK(contains(s.out, "final_loss_sum:"));
  CHECK(contains(s.out, "final_loss_per_dyad:"));

  for (const char* f : {"result.json", "embedding.eed", "trace.csv",
                        "activeset.csv", "manifest.json"}) {
    CHECK(fs::exists(cli.path(std::string("run/") + f)));
  }
  auto result =
      nlohmann::json::parse(CliFixture::slurp(cli.path("run/result.json")));
  CHECK(result["d_star"] == 1);
  CHECK(result["aborted_at_ub"] == false);
  CHECK(result["trials"].size() >= 2);

  auto chk = cli.run("check '" + cli.path("run/embedding.eed") + "' '" +
                     cli.path("blocks/graph.edges") + "'");
  CHECK(chk.code == 0);
  CHECK(contains(chk.out, "exact: yes"));

  // The stored active set of an exact search result is empty.
  CHECK(CliFixture::slurp(cli.path("run/activeset.csv")) == "i,j,label\n");
}

TEST_CASE("search results are byte reproducible for a fixed seed") {
  CliFixture cli;
  REQUIRE(cli.run("generate blocks --sizes 6 6 --out '" + cli.path("blocks") +
                  "'")
              .code == 0);
  const std::string flags =
      "' --model l2 --lb 1 --ub 4 --epochs 2000 --check-every 50 --seed 11 "
      "--out '";
  REQUIRE(cli.run("search '" + cli.path("blocks/graph.edges") + flags +
                  cli.path("a") + "'")
              .code == 0);
  REQUIRE(cli.run("search '" + cli.path("blocks/graph.edges") + flags +
                  cli.path("b") + "'")
              .code == 0);
  for (const char* f : {"embedding.eed", "trace.csv", "activeset.csv"}) {
    CHECK(CliFixture::slurp(cli.path(std::string("a/") + f)) ==
          CliFixture::slurp(cli.path(std::string("b/") + f)));
  }
  // result.json records where each run wrote its embedding; everything else
  // must match exactly.
  auto ra = nlohmann::json::parse(CliFixture::slurp(cli.path("a/result.json")));
  auto rb = nlohmann::json::parse(CliFixture::slurp(cli.path("b/result.json")));
  CHECK(ra["embedding_path"] == cli.path("a/embedding.eed"));
  CHECK(rb["embedding_path"] == cli.path("b/embedding.eed"));
  ra.erase("embedding_path");
  rb.erase("embedding_path");
  CHECK(ra.dump() == rb.dump());
}

TEST_CASE("search aborts with guidance when the upper bound fails") {
  CliFixture cli;
  REQUIRE(cli.run("generate blocks --sizes 6 6 --out '" + cli.path("blocks") +
                  "'")
              .code == 0);
  auto s = cli.run("search '" + cli.path("blocks/graph.edges") +
                   "' --model l2 --lb 1 --ub 2 --epochs 1 --lr 1e-9 --out '" +
                   cli.path("run") + "'");
  CHECK(s.code == 1);
  CHECK(contains(s.err, "no exact embedding found at ub=2"));
  auto result =
      nlohmann::json::parse(CliFixture::slurp(cli.path("run/result.json")));
  CHECK(result["d_star"].is_null());
  CHECK(result["aborted_at_ub"] == true);
}

TEST_CASE("multi seed fan-out aggregates into a summary") {
  CliFixture cli;
  REQUIRE(cli.run("generate blocks --sizes 6 6 --out '" + cli.path("blocks") +
                  "'")
              .code == 0);
  auto s = cli.run("search '" + cli.path("blocks/graph.edges") +
                   "' --model l2 --lb 1 --ub 4 --epochs 3000 "
                   "--check-every 50 --seeds 4 5 6 --jobs 2 --out '" +
                   cli.path("fan") + "'");
  REQUIRE(s.code == 0);
  CHECK(contains(s.out, "d_star_min: 1"));
  for (const char* d : {"seed_4", "seed_5", "seed_6"}) {
    CHECK(fs::exists(cli.path(std::string("fan/") + d + "/result.json")));
  }
  auto summary =
      nlohmann::json::parse(CliFixture::slurp(cli.path("fan/summary.json")));
  CHECK(summary["d_star_min"] == 1);
  CHECK(summary["seeds"].size() == 3);
}

TEST_CASE("stats reports the true graph and exact reconstructions") {
  CliFixture cli;
  REQUIRE(cli.run(
                 "generate geometric --n 40 --dim 2 --bias 0.9 --seed 7 "
                 "--out '" +
                 cli.path("geo") + "'")
              .code == 0);

  auto plain = cli.run("stats '" + cli.path("geo/graph.edges") + "'");
  REQUIRE(plain.code == 0);
  std::istringstream in(plain.out);
  std::string header, true_row;
  std::getline(in, header);
  std::getline(in, true_row);
  CHECK(header ==
        "variant,d,n,ordered_links,avg_degree,density,max_degree,triangles,"
        "components,avg_shortest_path");
  CHECK(true_row.rfind("true,-,40,", 0) == 0);

  auto rec = cli.run("stats '" + cli.path("geo/graph.edges") +
                     "' --embedding '" + cli.path("geo/truth.eed") +
                     "' --reconstructed --out '" + cli.path("st") + "'");
  REQUIRE(rec.code == 0);
  std::istringstream in2(rec.out);
  std::string h2, r_true, r_rec;
  std::getline(in2, h2);
  std::getline(in2, r_true);
  std::getline(in2, r_rec);
  // An exact embedding reconstructs the same graph: identical stats columns.
  CHECK(r_rec.substr(r_rec.find(",2,") + 2) ==
        r_true.substr(r_true.find(",-,") + 2));
  CHECK(fs::exists(cli.path("st/stats.csv")));
  CHECK(fs::exists(cli.path("st/manifest.json")));

  auto multi = cli.run("stats '" + cli.path("geo/graph.edges") +
                       "' --embedding '" + cli.path("geo/truth.eed") +
                       "' --dims 1 2");
  REQUIRE(multi.code == 0);
  int rec_rows = 0;
  std::istringstream in3(multi.out);
  std::string line;
  while (std::getline(in3, line))
    if (line.rfind("reconstructed,", 0) == 0) ++rec_rows;
  CHECK(rec_rows == 2);

  CHECK(cli.run("stats '" + cli.path("geo/graph.edges") + "' --reconstructed")
            .code == 2);
}

}  // TEST_SUITE

#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "eed/embedding.hpp"
#include "eed/rng.hpp"

namespace {

namespace fs = std::filesystem;

std::string temp_file(const std::string& stem) {
  static int counter = 0;
  return (fs::temp_directory_path() /
          (stem + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++) + ".eed"))
      .string();
}

eed::Embedding random_embedding(int n, int d, eed::ModelKind model,
                                std::uint64_t seed) {
  auto gen = eed::substream(seed, "init");
  std::normal_distribution<double> normal(0.0, 1.0);
  eed::Embedding e;
  e.model = model;
  e.x.resize(n, d);
  e.y.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) {
      e.x(i, k) = normal(gen);
      e.y(i, k) = normal(gen);
    }
  e.bias = model == eed::ModelKind::L2 ? 1.0 : -0.25;
  return e;
}

// Dyad-for-dyad agreement of strict-positive link predictions.
void check_same_predictions(const eed::Embedding& a, const eed::Embedding& b) {
  REQUIRE(a.num_nodes() == b.num_nodes());
  for (int i = 0; i < a.num_nodes(); ++i)
    for (int j = 0; j < a.num_nodes(); ++j)
      CHECK(a.predicts_link(i, j) == b.predicts_link(i, j));
}

}  // namespace

TEST_SUITE("embedding") {

TEST_CASE("logits per model") {
  eed::Embedding e;
  e.x.resize(1, 2);
  e.y.resize(1, 2);

  e.model = eed::ModelKind::Lpca;
  e.x << 1.0, 2.0;
  e.y << 3.0, -1.0;
  CHECK(e.logit(0, 0) == doctest::Approx(1.0));

  e.model = eed::ModelKind::L2;
  e.bias = 0.5;
  e.y = e.x;
  CHECK(e.logit(0, 0) == doctest::Approx(0.5));
  CHECK(e.predicts_link(0, 0));

  e.model = eed::ModelKind::Eig;
  e.x << 0.0, 0.0;
  e.y << 5.0, 5.0;
  e.bias = -2.0;
  CHECK(e.logit(0, 0) == doctest::Approx(-2.0));
  CHECK_FALSE(e.predicts_link(0, 0));
}

TEST_CASE("zero logit never predicts a link") {
  eed::Embedding e;
  e.model = eed::ModelKind::Lpca;
  e.x = Eigen::MatrixXd::Zero(2, 3);
  e.y = Eigen::MatrixXd::Ones(2, 3);
  CHECK_FALSE(e.predicts_link(0, 1));
  CHECK_FALSE(e.predicts_link(1, 0));
}

TEST_CASE("model names round trip") {
  for (auto m : {eed::ModelKind::Lpca, eed::ModelKind::Eig,
                 eed::ModelKind::L2}) {
    CHECK(eed::model_kind_from_string(eed::to_string(m)) == m);
  }
  CHECK_THROWS_AS(eed::model_kind_from_string("spectral"),
                  std::invalid_argument);
}

TEST_CASE("dot product factorization to distance model by normalization") {
  eed::Embedding e;
  e.model = eed::ModelKind::Lpca;
  e.x.resize(2, 2);
  e.y.resize(2, 2);
  e.x << 2.0, 0.0, 1.0, 0.0;
  e.y << 1.0, 1.0, -1.0, 0.0;

  auto l2 = eed::l2_from_lpca(e);
  CHECK(l2.model == eed::ModelKind::L2);
  CHECK(l2.bias == doctest::Approx(std::sqrt(2.0)));
  CHECK(l2.dim() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(l2.x.row(i).norm() == doctest::Approx(1.0));
    CHECK(l2.y.row(i).norm() == doctest::Approx(1.0));
  }

  // Positive dot -> distance below sqrt(2); negative -> above.
  CHECK(e.logit(0, 0) > 0.0);
  CHECK(eed::row_distance(l2.x, 0, l2.y, 0) < std::sqrt(2.0));
  CHECK(e.logit(0, 1) < 0.0);
  CHECK(eed::row_distance(l2.x, 0, l2.y, 1) > std::sqrt(2.0));
  check_same_predictions(e, l2);
}

TEST_CASE("normalization rejects zero rows by index") {
  eed::Embedding e;
  e.model = eed::ModelKind::Lpca;
  e.x = Eigen::MatrixXd::Ones(3, 2);
  e.y = Eigen::MatrixXd::Ones(3, 2);
  e.x.row(2).setZero();
  try {
    eed::l2_from_lpca(e);
    FAIL("expected failure on zero row");
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("distance to dot conversion adds two coordinates") {
  auto e = random_embedding(12, 3, eed::ModelKind::L2, 41);
  auto lp = eed::lpca_from_l2(e);
  CHECK(lp.model == eed::ModelKind::Lpca);
  CHECK(lp.dim() == 5);
  for (int i = 0; i < e.num_nodes(); ++i)
    for (int j = 0; j < e.num_nodes(); ++j) {
      const double dist = eed::row_distance(e.x, i, e.y, j);
      const double want = e.bias * e.bias - dist * dist;
      CHECK(lp.logit(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
  check_same_predictions(e, lp);
}

TEST_CASE("bias fold between dot models preserves logits exactly") {
  auto e = random_embedding(10, 4, eed::ModelKind::Eig, 17);
  auto lp = eed::lpca_from_eig(e);
  CHECK(lp.dim() == 5);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      CHECK(lp.logit(i, j) == doctest::Approx(e.logit(i, j)).epsilon(1e-14));

  auto back = eed::eig_from_lpca(lp);
  CHECK(back.model == eed::ModelKind::Eig);
  CHECK(back.bias == 0.0);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      CHECK(back.logit(i, j) == doctest::Approx(e.logit(i, j)).epsilon(1e-14));
}

TEST_CASE("conversion chain preserves predictions on random embeddings") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto l2 = random_embedding(15, 3, eed::ModelKind::L2, seed);
    check_same_predictions(l2, eed::lpca_from_l2(l2));

    auto eig = random_embedding(15, 3, eed::ModelKind::Eig, seed + 100);
    check_same_predictions(eig, eed::lpca_from_eig(eig));
    check_same_predictions(eig, eed::l2_from_lpca(eig));

    auto lp = random_embedding(15, 3, eed::ModelKind::Lpca, seed + 200);
    check_same_predictions(lp, eed::l2_from_lpca(lp));
  }
}

TEST_CASE("dot logits are invariant to positive per-row rescaling") {
  auto e = random_embedding(8, 3, eed::ModelKind::Lpca, 9);
  eed::Embedding scaled = e;
  for (int i = 0; i < 8; ++i) {
    const double s = 0.5 + i * 0.25;
    scaled.x.row(i) *= s;
    scaled.y.row(i) /= 1.0 + 0.1 * i;
  }
  check_same_predictions(e, scaled);
}

TEST_CASE("distance logits are invariant to shared translation and rotation") {
  auto e = random_embedding(10, 3, eed::ModelKind::L2, 23);

  eed::Embedding moved = e;
  Eigen::RowVector3d t(2.5, -1.0, 0.75);
  moved.x.rowwise() += t;
  moved.y.rowwise() += t;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      CHECK(moved.logit(i, j) == doctest::Approx(e.logit(i, j)).epsilon(1e-12));

  Eigen::MatrixXd m = Eigen::MatrixXd::Random(3, 3);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  eed::Embedding rotated = e;
  rotated.x = e.x * q;
  rotated.y = e.y * q;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      CHECK(rotated.logit(i, j) ==
            doctest::Approx(e.logit(i, j)).epsilon(1e-10));
}

TEST_CASE("save and load round trip is bit exact") {
  for (auto model : {eed::ModelKind::Lpca, eed::ModelKind::Eig,
                     eed::ModelKind::L2}) {
    auto e = random_embedding(7, 4, model, 77);
    auto path = temp_file("roundtrip");
    eed::save_embedding(e, path);
    auto l = eed::load_embedding(path);
    CHECK(l.model == e.model);
    CHECK(l.x == e.x);
    CHECK(l.y == e.y);
    if (model == eed::ModelKind::Lpca) {
      CHECK(l.bias == 0.0);
    } else {
      CHECK(l.bias == e.bias);
    }
    fs::remove(path);
  }
}

TEST_CASE("loader rejects malformed files") {
  auto write = [](const std::string& body) {
    auto p = temp_file("malformed");
    std::ofstream out(p);
    out << body;
    return p;
  };

  auto bad_magic = write("EED9 lpca 1 1 NA\n0.0\n0.0\n");
  CHECK_THROWS_AS(eed::load_embedding(bad_magic), std::runtime_error);
  fs::remove(bad_magic);

  auto truncated = write("EED1 lpca 2 2 NA\n0.0 0.0\n1.0 1.0\n2.0 2.0\n");
  CHECK_THROWS_AS(eed::load_embedding(truncated), std::runtime_error);
  fs::remove(truncated);

  auto negative_radius = write("EED1 l2 1 1 -0.5\n0.0\n0.0\n");
  CHECK_THROWS_AS(eed::load_embedding(negative_radius), std::runtime_error);
  fs::remove(negative_radius);

  CHECK_THROWS_AS(eed::load_embedding(temp_file("missing")),
                  std::runtime_error);
}

TEST_CASE("distance model refuses a negative radius on save") {
  auto e = random_embedding(3, 2, eed::ModelKind::L2, 5);
  e.bias = -1.0;
  auto path = temp_file("negbias");
  CHECK_THROWS_AS(eed::save_embedding(e, path), std::runtime_error);
  fs::remove(path);
}

}  // TEST_SUITE

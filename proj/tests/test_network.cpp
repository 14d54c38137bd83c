#include <Eigen/Dense>
#include <cstdio>
#include <random>
#include <vector>

#include "doctest.h"
#include "gnhp/network.hpp"
#include "gnhp/rng.hpp"
#include "helpers.hpp"

using gnhp::Network;
using gnhp::TransitionMatrix;

TEST_CASE("edges keep both adjacency indexes consistent") {
  Network net(4);
  net.add_edge(0, 1);
  net.add_edge(0, 2);
  net.add_edge(3, 1);
  net.add_edge(0, 1);  // duplicate, ignored
  CHECK(net.out_degree(0) == 2);
  CHECK(net.has_edge(0, 1));
  CHECK(!net.has_edge(1, 0));
  CHECK(net.in_neighbors(1) == std::vector<int>{0, 3});
  CHECK_THROWS(net.add_edge(2, 2));
  CHECK_THROWS(net.add_edge(0, 7));
}

TEST_CASE("edges csv round trip") {
  auto rng = gnhp::substream(5, 0);
  Network net = testutil::random_network(15, 0.2, rng);
  const char* path = "roundtrip_edges.csv";
  net.save_edges_csv(path);
  Network back = Network::load_edges_csv(path);
  REQUIRE(back.size() == net.size());
  for (int i = 0; i < net.size(); ++i)
    CHECK(back.out_neighbors(i) == net.out_neighbors(i));
  std::remove(path);
}

TEST_CASE("sbm edge frequencies track the block probabilities") {
  auto rng = gnhp::substream(7, 0);
  const int m = 400;
  Network net = gnhp::generate_sbm(m, 3, 0.05, 0.01, rng);
  double edges = 0.0;
  for (int i = 0; i < m; ++i) edges += net.out_degree(i);
  // Expected density: within-block share ~ 1/3 at 0.05, rest at 0.01.
  const double p = 0.05 / 3.0 + 0.01 * 2.0 / 3.0;
  const double want = p * m * (m - 1);
  CHECK(std::abs(edges - want) < 5 * std::sqrt(want));
}

TEST_CASE("power-law generator yields a valid graph") {
  auto rng = gnhp::substream(9, 0);
  const int m = 200;
  Network net = gnhp::generate_power_law(m, 2.0, rng);
  int max_in = 0;
  for (int i = 0; i < m; ++i) {
    CHECK(!net.has_edge(i, i));
    max_in = std::max(max_in, static_cast<int>(net.in_neighbors(i).size()));
  }
  CHECK(max_in >= 5);  // heavy tail produces at least one hub
}

TEST_CASE("neumann solves agree with a dense inverse") {
  auto rng = gnhp::substream(11, 0);
  const int m = 12;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m, m);
  TransitionMatrix B(m);
  for (int i = 0; i < m; ++i) {
    std::vector<int> cols;
    std::vector<double> vals;
    for (int j = 0; j < m; ++j)
      if (unif(rng) < 0.4) {
        cols.push_back(j);
        vals.push_back(unif(rng));
      }
    double s = 0.0;
    for (double v : vals) s += v;
    if (s > 0.0)
      for (double& v : vals) v *= 0.8 * unif(rng) / s;  // row sum < 0.8
    for (std::size_t k = 0; k < cols.size(); ++k) dense(i, cols[k]) = vals[k];
    B.set_row(i, cols, vals);
  }
  CHECK(B.stable());
  Eigen::MatrixXd inv =
      (Eigen::MatrixXd::Identity(m, m) - dense).inverse();
  for (int src : {0, 3, 7}) {
    auto col = B.neumann_column(src);
    for (int i = 0; i < m; ++i)
      CHECK(col[i] == doctest::Approx(inv(i, src)).epsilon(1e-9));
  }
  std::vector<double> ones(m, 1.0);
  auto row = B.neumann_row(ones);
  Eigen::VectorXd want = inv.transpose() * Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i)
    CHECK(row[i] == doctest::Approx(want(i)).epsilon(1e-9));
  std::vector<bool> set(m, false);
  set[2] = set[5] = true;
  double inf = B.solve_influence(set, 3);
  CHECK(inf == doctest::Approx(inv(2, 3) + inv(5, 3)).epsilon(1e-9));
}

TEST_CASE("unstable matrices are rejected") {
  TransitionMatrix B(2);
  B.set_row(0, {0, 1}, {0.6, 0.5});
  B.set_row(1, {0}, {0.2});
  CHECK(B.row_sum_norm() == doctest::Approx(1.1));
  CHECK(!B.stable());
  CHECK_THROWS_AS(B.neumann_column(0), gnhp::InstabilityError);
}

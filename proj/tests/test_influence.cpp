#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "gnhp/influence.hpp"
#include "gnhp/rng.hpp"
#include "helpers.hpp"

TEST_CASE("node influence equals the dense column sums") {
  auto rng = gnhp::substream(101, 0);
  const int m = 10;
  auto net = testutil::random_network(m, 0.3, rng);
  auto model = testutil::random_model(m, 2, 6, rng);
  auto B = gnhp::build_transition(net, model);
  auto inf = gnhp::node_influence(B);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) dense(i, j) = B.entry(i, j);
  Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(m, m) - dense).inverse();
  for (int j = 0; j < m; ++j) {
    CHECK(inf[j] == doctest::Approx(inv.col(j).sum()).epsilon(1e-9));
    CHECK(inf[j] >= 1.0);
  }
}

TEST_CASE("gif curves aggregate to the node influence identity") {
  auto rng = gnhp::substream(103, 0);
  const int m = 12;
  auto net = testutil::random_network(m, 0.3, rng);
  auto model = testutil::random_model(m, 3, 6, rng);
  auto B = gnhp::build_transition(net, model);
  auto report = gnhp::influence_report(model, net, B);
  const auto inf = gnhp::node_influence(B);
  for (int gs = 0; gs < 3; ++gs) {
    double group_sum = 0.0;
    for (int i = 0; i < m; ++i)
      if (model.membership[i] == gs) group_sum += inf[i];
    for (std::size_t q = 0; q < report.grid.size(); q += 17) {
      double total = 0.0;
      for (const auto& c : report.curves)
        if (c.source_group == gs) total += c.values[q];
      const double want = group_sum * model.baseline(gs, report.grid[q]);
      CHECK(total == doctest::Approx(want).epsilon(1e-8));
    }
  }
  for (const auto& c : report.curves)
    for (double v : c.values) CHECK(v >= 0.0);
  // Ranking is sorted by descending power.
  for (std::size_t k = 1; k < report.ranking.size(); ++k)
    CHECK(report.influence[report.ranking[k - 1]] >=
          report.influence[report.ranking[k]]);
}

TEST_CASE("csv emitters produce the documented headers") {
  auto rng = gnhp::substream(105, 0);
  auto net = testutil::random_network(8, 0.3, rng);
  auto model = testutil::random_model(8, 2, 6, rng);
  auto B = gnhp::build_transition(net, model);
  auto report = gnhp::influence_report(model, net, B, 1.0);
  gnhp::save_ranking_csv(report, model, "rank_test.csv");
  gnhp::save_gif_csv(report, "gif_test.csv");
  std::ifstream r("rank_test.csv"), g("gif_test.csv");
  std::string hr, hg;
  std::getline(r, hr);
  std::getline(g, hg);
  CHECK(hr == "node,group,influence");
  CHECK(hg == "t,source_group,target_group,gif");
  std::remove("rank_test.csv");
  std::remove("gif_test.csv");
}

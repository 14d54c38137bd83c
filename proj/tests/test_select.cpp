#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gnhp/rng.hpp"
#include "gnhp/select.hpp"
#include "gnhp/simulate.hpp"
#include "helpers.hpp"

using gnhp::EmConfig;
using gnhp::EventData;
using gnhp::Network;

TEST_CASE("penalty weight follows the closed form") {
  // Median count 100, T = 60, every node with out-degree 16:
  // lambda = (1/900) * 100^0.6 * 16^0.25.
  const int m = 18;
  Network net(m);
  for (int i = 0; i < m; ++i)
    for (int k = 1; k <= 16; ++k) net.add_edge(i, (i + k) % m);
  std::vector<std::vector<double>> raw(m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < 100; ++k) raw[i].push_back(0.5 * k + 0.25);
  EventData data = EventData::from_raw(std::move(raw), 60.0, 12.0);
  const double want = std::pow(100.0, 0.6) * std::pow(16.0, 0.25) / 900.0;
  CHECK(gnhp::lic_lambda(data, net) == doctest::Approx(want).epsilon(1e-12));
  CHECK(want == doctest::Approx(0.035220).epsilon(1e-4));
}

TEST_CASE("merging collapses the closest pair of groups") {
  auto rng = gnhp::substream(91, 0);
  auto model = testutil::random_model(12, 3, 6, rng);
  // Make groups 0 and 2 nearly identical so they merge.
  model.weights[2] = model.weights[0];
  model.beta[2] = model.beta[0] + 1e-4;
  model.eta[2] = model.eta[0];
  model.gamma[2] = model.gamma[0];
  model.phi[2] = model.phi[0];
  auto merged = gnhp::merge_closest_groups(model);
  CHECK(merged.num_groups == 2);
  CHECK(static_cast<int>(merged.membership.size()) == 12);
  for (int g : merged.membership) {
    CHECK(g >= 0);
    CHECK(g < 2);
  }
  for (int i = 0; i < 12; ++i) {
    const int old = model.membership[i];
    if (old == 1)
      CHECK(merged.beta[merged.membership[i]] ==
            doctest::Approx(model.beta[1]));
  }
}

TEST_CASE("lic scan prefers the true group count on separated data") {
  auto rng = gnhp::substream(93, 0);
  const int m = 40;
  Network net = testutil::random_network(m, 0.2, rng);
  auto model = testutil::random_model(m, 2, 8, rng);
  // Sharply different groups.
  for (int j = 0; j < 8; ++j) {
    model.weights[0][j] = 0.30;
    model.weights[1][j] = 0.02;
  }
  model.beta = {0.1, 0.6};
  model.eta = {2.0, 0.5};
  for (int i = 0; i < m; ++i) model.membership[i] = i % 2;
  auto sim = gnhp::simulate_branching(model, net, 240.0, 7);
  EmConfig cfg;
  cfg.num_basis = 8;
  cfg.n_starts = 1;
  cfg.kmeans_restarts = 5;
  cfg.stochastic_init_iters = 20;
  cfg.compute_covariance = false;
  cfg.refine_rounds = 1;
  auto res = gnhp::select_groups(net, sim.data, 1, 3, cfg);
  REQUIRE(res.table.size() == 3);
  CHECK(res.selected == 2);
  CHECK(res.lambda == doctest::Approx(gnhp::lic_lambda(sim.data, net)));
  for (const auto& e : res.table) {
    CHECK(!e.failed);
    CHECK(e.lic == doctest::Approx(e.loglik - res.lambda * e.num_groups));
  }

  const char* path = "lic_table.csv";
  res.save_table_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "G,loglik,penalty,lic,converged");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
  std::remove(path);
}

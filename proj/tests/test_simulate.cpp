#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "doctest.h"
#include "gnhp/rng.hpp"
#include "gnhp/simulate.hpp"
#include "helpers.hpp"

using gnhp::EventRecord;
using gnhp::SimulatedEvents;

TEST_CASE("branching simulation is reproducible and seed-sensitive") {
  auto rng = gnhp::substream(41, 0);
  auto net = testutil::ring_network(6);
  auto model = testutil::random_model(6, 2, 8, rng);
  auto a = gnhp::simulate_branching(model, net, 48.0, 123);
  auto b = gnhp::simulate_branching(model, net, 48.0, 123);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].node == b.records[k].node);
    CHECK(a.records[k].time == b.records[k].time);
    CHECK(a.records[k].parent_node == b.records[k].parent_node);
  }
  auto c = gnhp::simulate_branching(model, net, 48.0, 124);
  CHECK(a.records.size() != c.records.size());
}

TEST_CASE("provenance respects the branching structure") {
  auto rng = gnhp::substream(43, 0);
  auto net = testutil::ring_network(8);
  auto model = testutil::random_model(8, 2, 8, rng);
  auto sim = gnhp::simulate_branching(model, net, 96.0, 9);
  REQUIRE(sim.has_provenance);
  REQUIRE(sim.data.total_events() > 100);
  for (const EventRecord& r : sim.records) {
    CHECK(r.time >= 0.0);
    CHECK(r.time <= 96.0);
    if (r.parent_node < 0) {
      CHECK(r.generation == 0);
      continue;
    }
    CHECK(r.generation > 0);
    // Parent is the node itself (momentum) or a followed node (network).
    const bool own = r.parent_node == r.node;
    CHECK((own || net.has_edge(r.node, r.parent_node)));
    const double pt = sim.data.times[r.parent_node][r.parent_index];
    CHECK(pt < r.time);
    CHECK(r.time - pt <= model.truncation + 1e-12);
  }
}

TEST_CASE("branching and thinning agree on mean counts") {
  auto rng = gnhp::substream(45, 0);
  auto net = testutil::ring_network(5);
  auto model = testutil::random_model(5, 2, 6, rng);
  const int reps = 300;
  const double T = 24.0;
  double mean_b = 0.0, mean_t = 0.0, sq_b = 0.0, sq_t = 0.0;
  for (int r = 0; r < reps; ++r) {
    double nb = static_cast<double>(
        gnhp::simulate_branching(model, net, T, 1000 + r).data.total_events());
    double nt = static_cast<double>(
        gnhp::simulate_thinning(model, net, T, 5000 + r).data.total_events());
    mean_b += nb;
    mean_t += nt;
    sq_b += nb * nb;
    sq_t += nt * nt;
  }
  mean_b /= reps;
  mean_t /= reps;
  const double var =
      (sq_b / reps - mean_b * mean_b + sq_t / reps - mean_t * mean_t) / reps;
  CHECK(std::abs(mean_b - mean_t) < 4 * std::sqrt(var));
}

TEST_CASE("unstable models are rejected") {
  auto rng = gnhp::substream(47, 0);
  auto net = testutil::ring_network(4);
  auto model = testutil::random_model(4, 1, 6, rng);
  model.beta[0] = 0.9;
  model.phi[0][0] = 0.5;
  CHECK_THROWS_AS(gnhp::simulate_branching(model, net, 24.0, 1),
                  gnhp::InstabilityError);
  CHECK_THROWS_AS(gnhp::simulate_thinning(model, net, 24.0, 1),
                  gnhp::InstabilityError);
}

TEST_CASE("event cap aborts runaway simulations") {
  auto rng = gnhp::substream(49, 0);
  auto net = testutil::ring_network(4);
  auto model = testutil::random_model(4, 1, 6, rng);
  gnhp::SimulateOptions opts;
  opts.max_events = 10;
  CHECK_THROWS(gnhp::simulate_branching(model, net, 480.0, 1, opts));
}

TEST_CASE("events csv round trips with provenance") {
  auto rng = gnhp::substream(51, 0);
  auto net = testutil::ring_network(5);
  auto model = testutil::random_model(5, 2, 6, rng);
  auto sim = gnhp::simulate_branching(model, net, 36.0, 77);
  const char* path = "roundtrip_events.csv";
  sim.save_csv(path, true);
  auto back = SimulatedEvents::load_csv(path, 36.0, 12.0, 5);
  REQUIRE(back.has_provenance);
  REQUIRE(back.records.size() == sim.records.size());
  for (std::size_t k = 0; k < sim.records.size(); ++k) {
    CHECK(back.records[k].node == sim.records[k].node);
    CHECK(back.records[k].time ==
          doctest::Approx(sim.records[k].time).epsilon(1e-9));
    CHECK(back.records[k].parent_node == sim.records[k].parent_node);
    CHECK(back.records[k].parent_index == sim.records[k].parent_index);
  }
  std::remove(path);
}

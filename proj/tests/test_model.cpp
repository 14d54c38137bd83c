#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "doctest.h"
#include "gnhp/model.hpp"
#include "gnhp/rng.hpp"
#include "helpers.hpp"

using gnhp::EventData;
using gnhp::GnhpModel;
using gnhp::Network;

namespace {

// Unabridged intensity evaluated straight from the definition.
double brute_intensity(const GnhpModel& model, const Network& net,
                       const EventData& data, int i, double t) {
  const int g = model.membership[i];
  double lam = model.baseline(g, t);
  auto own = model.momentum_kernel(g);
  for (double s : data.times[i])
    if (s < t) lam += model.beta[g] * own.density(t - s);
  auto nk = model.network_kernel(g);
  const auto& nbrs = net.out_neighbors(i);
  if (!nbrs.empty()) {
    const double invd = 1.0 / nbrs.size();
    for (int j : nbrs) {
      const double w = model.phi[g][model.membership[j]] * invd;
      for (double s : data.times[j])
        if (s < t) lam += w * nk.density(t - s);
    }
  }
  return lam;
}

EventData small_data(const Network& net, std::mt19937_64& rng, double T,
                     double omega, int per_node) {
  std::uniform_real_distribution<double> unif(0.0, T);
  std::vector<std::vector<double>> raw(net.size());
  for (int i = 0; i < net.size(); ++i)
    for (int k = 0; k < per_node; ++k) raw[i].push_back(unif(rng));
  return EventData::from_raw(std::move(raw), T, omega);
}

}  // namespace

TEST_CASE("intensity matches the brute-force definition") {
  auto rng = gnhp::substream(21, 0);
  Network net = testutil::ring_network(5);
  GnhpModel model = testutil::random_model(5, 2, 8, rng);
  EventData data = small_data(net, rng, 36.0, 12.0, 15);
  for (int i = 0; i < 5; ++i)
    for (double t : {0.5, 7.3, 18.0, 35.9}) {
      double want = brute_intensity(model, net, data, i, t);
      CHECK(gnhp::intensity(model, net, data, i, t) ==
            doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("log likelihood equals events term minus numeric compensator") {
  auto rng = gnhp::substream(23, 0);
  Network net = testutil::ring_network(4);
  GnhpModel model = testutil::random_model(4, 2, 6, rng);
  const double T = 24.0;
  EventData data = small_data(net, rng, T, 12.0, 10);
  double ll = 0.0;
  const int steps = 200000;
  for (int i = 0; i < 4; ++i) {
    for (double t : data.times[i])
      ll += std::log(gnhp::intensity(model, net, data, i, t));
    double comp = 0.0;  // midpoint rule dodges the event-time jumps
    for (int q = 0; q < steps; ++q)
      comp += gnhp::intensity(model, net, data, i, (q + 0.5) * T / steps);
    ll -= comp * T / steps;
  }
  CHECK(gnhp::log_likelihood(model, net, data) ==
        doctest::Approx(ll / (4 * T)).epsilon(1e-5));
}

TEST_CASE("node terms add up to the total log likelihood") {
  auto rng = gnhp::substream(25, 0);
  Network net = testutil::ring_network(6);
  GnhpModel model = testutil::random_model(6, 3, 6, rng);
  EventData data = small_data(net, rng, 24.0, 12.0, 12);
  double total = 0.0;
  for (int i = 0; i < 6; ++i)
    total += gnhp::node_log_likelihood(model, net, data, i);
  CHECK(total / 6 ==
        doctest::Approx(gnhp::log_likelihood(model, net, data))
            .epsilon(1e-10));
}

TEST_CASE("analytic score matches central finite differences") {
  auto rng = gnhp::substream(27, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const int m = 4;
    Network net = testutil::random_network(m, 0.5, rng);
    GnhpModel model = testutil::random_model(m, 2, 5, rng);
    EventData data = small_data(net, rng, 24.0, 12.0, 10);
    auto score = gnhp::score_and_hessian_plugin(model, net, data);
    const double h = 1e-6;
    auto check_coord = [&](double* param, int idx) {
      double keep = *param;
      *param = keep + h;
      double up = gnhp::log_likelihood(model, net, data);
      *param = keep - h;
      double dn = gnhp::log_likelihood(model, net, data);
      *param = keep;
      double fd = (up - dn) / (2 * h);
      CHECK(score.gradient[idx] == doctest::Approx(fd).epsilon(1e-5));
    };
    const int nb = model.basis.num_basis();
    for (int g = 0; g < 2; ++g) {
      for (int j = 0; j < nb; j += 2)
        check_coord(&model.weights[g][j], g * nb + j);
      check_coord(&model.beta[g], score.weight_dim + 3 * g);
      check_coord(&model.eta[g], score.weight_dim + 3 * g + 1);
      check_coord(&model.gamma[g], score.weight_dim + 3 * g + 2);
      for (int gp = 0; gp < 2; ++gp)
        check_coord(&model.phi[g][gp], score.weight_dim + 6 + g * 2 + gp);
    }
  }
}

TEST_CASE("json round trip preserves the model") {
  auto rng = gnhp::substream(29, 0);
  GnhpModel model = testutil::random_model(7, 3, 9, rng);
  GnhpModel back = GnhpModel::from_json(model.to_json());
  CHECK(back.num_groups == model.num_groups);
  CHECK(back.basis.num_basis() == model.basis.num_basis());
  CHECK(back.basis.order() == model.basis.order());
  CHECK(back.basis.period() == doctest::Approx(model.basis.period()));
  CHECK(back.truncation == doctest::Approx(model.truncation));
  CHECK(back.membership == model.membership);
  for (int g = 0; g < 3; ++g) {
    CHECK(back.beta[g] == doctest::Approx(model.beta[g]).epsilon(1e-12));
    CHECK(back.eta[g] == doctest::Approx(model.eta[g]).epsilon(1e-12));
    CHECK(back.gamma[g] == doctest::Approx(model.gamma[g]).epsilon(1e-12));
    for (int gp = 0; gp < 3; ++gp)
      CHECK(back.phi[g][gp] ==
            doctest::Approx(model.phi[g][gp]).epsilon(1e-12));
    for (int j = 0; j < 9; ++j)
      CHECK(back.weights[g][j] ==
            doctest::Approx(model.weights[g][j]).epsilon(1e-12));
  }
}

TEST_CASE("validate rejects broken parameterizations") {
  auto rng = gnhp::substream(31, 0);
  GnhpModel model = testutil::random_model(5, 2, 6, rng);
  CHECK_NOTHROW(model.validate(5));
  GnhpModel bad = model;
  bad.beta[0] = -0.1;
  CHECK_THROWS(bad.validate(5));
  bad = model;
  bad.membership[2] = 5;
  CHECK_THROWS(bad.validate(5));
  bad = model;
  bad.eta[1] = 0.0;
  CHECK_THROWS(bad.validate(5));
  CHECK_THROWS(model.validate(9));
}

TEST_CASE("transition matrix entries follow the definition") {
  auto rng = gnhp::substream(33, 0);
  Network net = testutil::random_network(8, 0.3, rng);
  GnhpModel model = testutil::random_model(8, 2, 6, rng);
  auto B = gnhp::build_transition(net, model);
  for (int i = 0; i < 8; ++i) {
    const int g = model.membership[i];
    const int d = net.out_degree(i);
    for (int j = 0; j < 8; ++j) {
      double want = (i == j) ? model.beta[g] : 0.0;
      if (d > 0 && net.has_edge(i, j))
        want += model.phi[g][model.membership[j]] / d;
      CHECK(B.entry(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

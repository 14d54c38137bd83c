#pragma once

// Shared fixtures for the unit tests: small random networks and models with
// interior (floor-free) parameters so finite differences behave.

#include <random>
#include <vector>

#include "gnhp/model.hpp"
#include "gnhp/network.hpp"

namespace testutil {

inline gnhp::Network ring_network(int m) {
  gnhp::Network net(m);
  for (int i = 0; i < m; ++i) {
    net.add_edge(i, (i + 1) % m);
    if (m > 2) net.add_edge(i, (i + 2) % m);
  }
  return net;
}

inline gnhp::Network random_network(int m, double p, std::mt19937_64& rng) {
  gnhp::Network net(m);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && unif(rng) < p) net.add_edge(i, j);
  return net;
}

// Random stable model on the given network; weights well above the floor,
// rates away from the box bounds.
inline gnhp::GnhpModel random_model(int m, int groups, int num_basis,
                                    std::mt19937_64& rng, double omega = 12.0,
                                    double trunc = 5.0) {
  gnhp::GnhpModel model{gnhp::PeriodicSplineBasis(4, num_basis, omega)};
  model.num_groups = groups;
  model.truncation = trunc;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int g = 0; g < groups; ++g) {
    std::vector<double> w(num_basis);
    for (double& x : w) x = 0.02 + 0.1 * unif(rng);
    model.weights.push_back(std::move(w));
    model.beta.push_back(0.1 + 0.3 * unif(rng));
    model.eta.push_back(0.5 + 1.5 * unif(rng));
    model.gamma.push_back(0.5 + 1.5 * unif(rng));
    std::vector<double> row(groups);
    for (double& p : row) p = 0.05 + 0.25 * unif(rng);
    model.phi.push_back(std::move(row));
  }
  model.membership.resize(m);
  std::uniform_int_distribution<int> pick(0, groups - 1);
  for (int i = 0; i < m; ++i) model.membership[i] = pick(rng);
  return model;
}

}  // namespace testutil

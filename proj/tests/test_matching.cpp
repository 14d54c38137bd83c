#include <random>
#include <vector>

#include "doctest.h"
#include "gnhp/matching.hpp"
#include "gnhp/rng.hpp"
#include "helpers.hpp"

TEST_CASE("hungarian solves small assignment problems") {
  std::vector<std::vector<double>> cost = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  auto a = gnhp::hungarian_assignment(cost);
  CHECK(a == std::vector<int>{1, 0, 2});
  std::vector<std::vector<double>> ident = {{0, 9}, {9, 0}};
  CHECK(gnhp::hungarian_assignment(ident) == std::vector<int>{0, 1});
}

TEST_CASE("group accuracy is permutation invariant") {
  std::vector<int> truth = {0, 0, 1, 1, 2, 2, 0, 1, 2};
  std::vector<int> relabeled = {2, 2, 0, 0, 1, 1, 2, 0, 1};
  CHECK(gnhp::group_accuracy_rate(relabeled, truth, 3) == doctest::Approx(1.0));
  std::vector<int> noisy = relabeled;
  noisy[0] = 0;  // one node off after the optimal permutation
  CHECK(gnhp::group_accuracy_rate(noisy, truth, 3) ==
        doctest::Approx(8.0 / 9.0));
}

TEST_CASE("pseudo distances vanish on identical models") {
  auto rng = gnhp::substream(95, 0);
  auto net = testutil::random_network(10, 0.3, rng);
  auto model = testutil::random_model(10, 2, 6, rng);
  CHECK(gnhp::pseudo_distance(model, model, net) == doctest::Approx(0.0));
  CHECK(gnhp::pd_baseline(model, model) == doctest::Approx(0.0).epsilon(1e-9));
  auto B = gnhp::build_transition(net, model);
  CHECK(gnhp::pd_transition(B, B, net) == doctest::Approx(0.0));
  CHECK(gnhp::pd_scalar(model.beta, model.membership, model.beta,
                        model.membership) == doctest::Approx(0.0));

  auto other = model;
  other.beta[0] += 0.1;
  CHECK(gnhp::pseudo_distance(model, other, net) > 0.0);
  CHECK(gnhp::pd_scalar(other.beta, other.membership, model.beta,
                        model.membership) > 0.0);
}

TEST_CASE("scalar pd averages the per-node deviation") {
  std::vector<double> est = {0.5, 0.7};
  std::vector<double> tru = {0.4, 0.9};
  std::vector<int> memb = {0, 0, 1, 1};
  // Nodes: |0.5-0.4| twice, |0.7-0.9| twice -> mean 0.15.
  CHECK(gnhp::pd_scalar(est, memb, tru, memb) == doctest::Approx(0.15));
}

#include "gnhp/presets.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gnhp {

namespace {

struct BumpSpec {
  double ratio;                // nu_1 / nu_0
  std::vector<double> starts;  // a_{h,g}
  double width;                // omega_0
  double target;               // per-period integral of mu_g
};

const std::vector<BumpSpec>& specs() {
  static const std::vector<BumpSpec> s = {
      {4.0, {3.0}, 1.0, 1.5},
      {6.0, {7.0}, 2.0, 1.0},
      {2.0, {5.0, 8.0}, 1.0, 0.5},
  };
  return s;
}

// nu_0 solved from  target = omega*nu_0 + nu_1 * H * (2*omega_0/pi).
double nu0(const BumpSpec& s) {
  const double bump_mass = s.ratio * s.starts.size() * 2.0 * s.width / M_PI;
  return s.target / (Table1Preset::kPeriod + bump_mass);
}

}  // namespace

double Table1Preset::baseline(int group, double t) {
  const BumpSpec& s = specs().at(group);
  double u = std::fmod(t, kPeriod);
  if (u < 0.0) u += kPeriod;
  double bumps = 0.0;
  for (double a : s.starts)
    if (u >= a && u <= a + s.width)
      bumps += std::sin((u - a) / s.width * M_PI);
  return nu0(s) * (1.0 + s.ratio * bumps);
}

double Table1Preset::baseline_integral(int group) {
  return specs().at(group).target;
}

const std::vector<double>& Table1Preset::beta() {
  static const std::vector<double> v = {0.5, 0.4, 0.7};
  return v;
}
const std::vector<double>& Table1Preset::eta() {
  static const std::vector<double> v = {1.5, 1.0, 2.0};
  return v;
}
const std::vector<double>& Table1Preset::gamma() {
  static const std::vector<double> v = {1.0, 2.0, 0.5};
  return v;
}
const std::vector<std::vector<double>>& Table1Preset::phi() {
  static const std::vector<std::vector<double>> v = {
      {0.4, 0.1, 0.1}, {0.6, 0.4, 0.5}, {0.15, 0.2, 0.1}};
  return v;
}
const std::vector<double>& Table1Preset::group_proportions() {
  static const std::vector<double> v = {0.3, 0.4, 0.3};
  return v;
}

std::vector<int> Table1Preset::sample_membership(int m, std::mt19937_64& rng) {
  std::discrete_distribution<int> pick(group_proportions().begin(),
                                       group_proportions().end());
  std::vector<int> out(m);
  for (int i = 0; i < m; ++i) out[i] = pick(rng);
  return out;
}

std::vector<int> Table1Preset::sample_stable_membership(const Network& net,
                                                        std::mt19937_64& rng,
                                                        int max_tries) {
  const int m = net.size();
  const auto& b = beta();
  const auto& ph = phi();
  // Resample only the labels of nodes whose transition row sum reaches 1;
  // rejecting the whole vector conditions the group proportions away from pi.
  std::vector<int> memb = sample_membership(m, rng);
  auto row_sum = [&](int i) {
    const auto& nb = net.out_neighbors(i);
    double row = b[memb[i]];
    if (!nb.empty()) {
      double s = 0.0;
      for (int j : nb) s += ph[memb[i]][memb[j]];
      row += s / static_cast<double>(nb.size());
    }
    return row;
  };
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    std::vector<int> bad;
    for (int i = 0; i < m; ++i)
      if (row_sum(i) >= 1.0) bad.push_back(i);
    if (bad.empty()) return memb;
    std::discrete_distribution<int> pick(group_proportions().begin(),
                                         group_proportions().end());
    for (int i : bad) memb[i] = pick(rng);
  }
  throw InstabilityError(
      "sample_stable_membership: no stable assignment found");
}

std::vector<double> project_baseline(const PeriodicSplineBasis& basis,
                                     const std::vector<double>& grid,
                                     const std::vector<double>& values) {
  if (grid.size() != values.size() || grid.empty())
    throw std::invalid_argument("project_baseline: grid/value mismatch");
  const int n = basis.num_basis();
  Eigen::MatrixXd X(grid.size(), n);
  X.setZero();
  int idx[32];
  double val[32];
  for (std::size_t q = 0; q < grid.size(); ++q) {
    basis.evaluate_local(grid[q], idx, val);
    for (int i = 0; i < basis.order(); ++i) X(q, idx[i]) = val[i];
  }
  Eigen::Map<const Eigen::VectorXd> y(values.data(), values.size());
  const Eigen::VectorXd w =
      (X.transpose() * X).ldlt().solve(X.transpose() * y);
  std::vector<double> out(n);
  const double floor = GnhpModel::kWeightFloorEps / basis.scale();
  for (int j = 0; j < n; ++j) out[j] = std::max(w(j), floor);
  return out;
}

GnhpModel Table1Preset::make_model(std::vector<int> membership,
                                   int spline_order, int num_basis) {
  GnhpModel model{PeriodicSplineBasis(spline_order, num_basis, kPeriod)};
  model.num_groups = kGroups;
  model.truncation = kTruncation;
  model.beta = beta();
  model.eta = eta();
  model.gamma = gamma();
  model.phi = phi();
  model.membership = std::move(membership);

  const int points = 600;
  std::vector<double> grid(points);
  for (int q = 0; q < points; ++q) grid[q] = (q + 0.5) * kPeriod / points;
  const std::vector<double> xint = model.basis.integral_over(0.0, kPeriod);
  model.weights.resize(kGroups);
  for (int g = 0; g < kGroups; ++g) {
    std::vector<double> mu(points);
    for (int q = 0; q < points; ++q) mu[q] = baseline(g, grid[q]);
    std::vector<double> w = project_baseline(model.basis, grid, mu);
    double integral = 0.0;
    for (int j = 0; j < model.basis.num_basis(); ++j)
      integral += w[j] * xint[j];
    const double scale = baseline_integral(g) / integral;
    const double floor = model.weight_floor();
    for (double& wj : w) wj = std::max(wj * scale, floor);
    model.weights[g] = std::move(w);
  }
  model.validate();
  return model;
}

}  // namespace gnhp

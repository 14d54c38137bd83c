#include "gnhp/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gnhp {

std::vector<int> hungarian_assignment(
    const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("hungarian: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials formulation, 1-based scratch arrays.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(n);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

std::vector<int> match_groups(const GnhpModel& estimated,
                              const GnhpModel& truth) {
  if (estimated.num_groups != truth.num_groups)
    throw std::invalid_argument("match_groups: group counts differ");
  const int G = truth.num_groups;
  std::vector<std::vector<double>> cost(G, std::vector<double>(G, 0.0));
  for (int a = 0; a < G; ++a)
    for (int b = 0; b < G; ++b) {
      double c = 0.0;
      for (std::size_t j = 0; j < truth.weights[b].size(); ++j) {
        const double d = estimated.weights[a][j] - truth.weights[b][j];
        c += d * d;
      }
      const double db = estimated.beta[a] - truth.beta[b];
      const double de = estimated.eta[a] - truth.eta[b];
      const double dg = estimated.gamma[a] - truth.gamma[b];
      cost[a][b] = c + db * db + de * de + dg * dg;
    }
  return hungarian_assignment(cost);
}

double group_accuracy_rate(const std::vector<int>& estimated,
                           const std::vector<int>& truth, int num_groups) {
  if (estimated.size() != truth.size())
    throw std::invalid_argument("group_accuracy_rate: length mismatch");
  const int G = num_groups;
  // Maximizing matches = minimizing (m - matches); build match-count matrix.
  std::vector<std::vector<double>> cost(G, std::vector<double>(G, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i)
    cost[estimated[i]][truth[i]] -= 1.0;
  const std::vector<int> perm = hungarian_assignment(cost);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (perm[estimated[i]] == truth[i]) ++hits;
  return static_cast<double>(hits) / truth.size();
}

double pseudo_distance(const GnhpModel& a, const GnhpModel& b,
                       const Network& net) {
  const int m = net.size();
  if (static_cast<int>(a.membership.size()) != m ||
      static_cast<int>(b.membership.size()) != m)
    throw std::invalid_argument("pseudo_distance: membership length mismatch");
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const int ga = a.membership[i];
    const int gb = b.membership[i];
    double dw = 0.0;
    for (std::size_t j = 0; j < a.weights[ga].size(); ++j) {
      const double d = a.weights[ga][j] - b.weights[gb][j];
      dw += d * d;
    }
    double dt = 0.0;
    dt += (a.beta[ga] - b.beta[gb]) * (a.beta[ga] - b.beta[gb]);
    dt += (a.eta[ga] - b.eta[gb]) * (a.eta[ga] - b.eta[gb]);
    dt += (a.gamma[ga] - b.gamma[gb]) * (a.gamma[ga] - b.gamma[gb]);
    double dp = 0.0;
    const auto& nbrs = net.out_neighbors(i);
    if (!nbrs.empty()) {
      const double inv_sqrt_d = 1.0 / std::sqrt(double(nbrs.size()));
      for (int j : nbrs) {
        const double pa = a.phi[ga][a.membership[j]];
        const double pb = b.phi[gb][b.membership[j]];
        const double d = inv_sqrt_d * (pa - pb);
        dp += d * d;
      }
    }
    total += std::sqrt(dw) + std::sqrt(dt) + std::sqrt(dp);
  }
  return total / m;
}

double pd_scalar(const std::vector<double>& est_param,
                 const std::vector<int>& est_membership,
                 const std::vector<double>& true_param,
                 const std::vector<int>& true_membership) {
  if (est_membership.size() != true_membership.size())
    throw std::invalid_argument("pd_scalar: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < est_membership.size(); ++i)
    s += std::abs(est_param[est_membership[i]] -
                  true_param[true_membership[i]]);
  return s / est_membership.size();
}

double pd_baseline(const GnhpModel& est, const GnhpModel& truth,
                   int quadrature_points) {
  if (est.membership.size() != truth.membership.size())
    throw std::invalid_argument("pd_baseline: membership length mismatch");
  const double omega = truth.basis.period();
  const double h = omega / quadrature_points;
  // Midpoint rule: baselines are bounded piecewise-smooth, this is plenty
  // for a reporting metric.
  std::vector<std::vector<double>> abs_err(
      est.num_groups, std::vector<double>(truth.num_groups, 0.0));
  for (int a = 0; a < est.num_groups; ++a)
    for (int b = 0; b < truth.num_groups; ++b) {
      double s = 0.0;
      for (int q = 0; q < quadrature_points; ++q) {
        const double t = (q + 0.5) * h;
        s += std::abs(est.baseline(a, t) - truth.baseline(b, t));
      }
      abs_err[a][b] = s * h;
    }
  double total = 0.0;
  for (std::size_t i = 0; i < truth.membership.size(); ++i)
    total += abs_err[est.membership[i]][truth.membership[i]];
  return total / truth.membership.size();
}

double pd_transition(const TransitionMatrix& est, const TransitionMatrix& tru,
                     const Network& net) {
  const int m = net.size();
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j : net.out_neighbors(i)) {
      const double d = est.entry(i, j) - tru.entry(i, j);
      s += d * d;
    }
  return std::sqrt(s / m);
}

}  // namespace gnhp

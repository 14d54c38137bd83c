#include "gnhp/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gnhp {

Network::Network(int num_nodes) : m_(num_nodes), out_(num_nodes), in_(num_nodes) {
  if (num_nodes < 1) throw std::invalid_argument("Network: need >= 1 node");
}

void Network::add_edge(int src, int dst) {
  if (src < 0 || src >= m_ || dst < 0 || dst >= m_)
    throw std::invalid_argument("Network::add_edge: node index out of range");
  if (src == dst)
    throw std::invalid_argument("Network::add_edge: self loops not allowed");
  auto it = std::lower_bound(out_[src].begin(), out_[src].end(), dst);
  if (it != out_[src].end() && *it == dst) return;
  out_[src].insert(it, dst);
  auto jt = std::lower_bound(in_[dst].begin(), in_[dst].end(), src);
  in_[dst].insert(jt, src);
}

bool Network::has_edge(int src, int dst) const {
  if (src < 0 || src >= m_ || dst < 0 || dst >= m_) return false;
  return std::binary_search(out_[src].begin(), out_[src].end(), dst);
}

Network Network::load_edges_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edges file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("src", 0) != 0)
    throw std::runtime_error("edges file missing 'src,dst' header: " + path);
  std::vector<std::pair<int, int>> edges;
  int max_id = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int s, d;
    char comma;
    if (!(ss >> s >> comma >> d))
      throw std::runtime_error("malformed edge line: " + line);
    edges.emplace_back(s, d);
    max_id = std::max({max_id, s, d});
  }
  Network net(max_id + 1);
  for (auto [s, d] : edges) net.add_edge(s, d);
  return net;
}

void Network::save_edges_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edges file: " + path);
  out << "src,dst\n";
  for (int i = 0; i < m_; ++i)
    for (int j : out_[i]) out << i << ',' << j << '\n';
}

Network generate_sbm(int m, int blocks, double p_within, double p_between,
                     std::mt19937_64& rng) {
  if (m < 2) throw std::invalid_argument("generate_sbm: need m >= 2");
  if (blocks < 1) throw std::invalid_argument("generate_sbm: blocks >= 1");
  std::uniform_int_distribution<int> pick(0, blocks - 1);
  std::vector<int> label(m);
  for (int i = 0; i < m; ++i) label[i] = pick(rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Network net(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const double p = (label[i] == label[j]) ? p_within : p_between;
      if (p > 0.0 && unif(rng) < p) net.add_edge(i, j);
    }
  return net;
}

Network generate_sbm(int m, int blocks, std::mt19937_64& rng) {
  const double pw = 0.3 * std::pow(m, -0.3);
  const double pb = 0.3 * std::pow(m, -0.8);
  return generate_sbm(m, blocks, pw, pb, rng);
}

Network generate_power_law(int m, double exponent, std::mt19937_64& rng) {
  if (m < 2) throw std::invalid_argument("generate_power_law: need m >= 2");
  if (!(exponent > 1.0))
    throw std::invalid_argument("generate_power_law: exponent must be > 1");
  // Follower-count distribution on {1, ..., m-1}.
  std::vector<double> pmf(m - 1);
  for (int f = 1; f <= m - 1; ++f) pmf[f - 1] = std::pow(f, -exponent);
  std::discrete_distribution<int> count_dist(pmf.begin(), pmf.end());
  Network net(m);
  std::vector<int> others(m - 1);
  for (int i = 0; i < m; ++i) {
    const int f = count_dist(rng) + 1;
    int k = 0;
    for (int j = 0; j < m; ++j)
      if (j != i) others[k++] = j;
    // Partial Fisher-Yates: first f entries are a uniform sample.
    for (int t = 0; t < f; ++t) {
      std::uniform_int_distribution<int> pick(t, m - 2);
      std::swap(others[t], others[pick(rng)]);
      net.add_edge(others[t], i);
    }
  }
  return net;
}

TransitionMatrix::TransitionMatrix(int m) : m_(m), cols_(m), vals_(m) {
  if (m < 0) throw std::invalid_argument("TransitionMatrix: need m >= 0");
}

void TransitionMatrix::set_row(int i, std::vector<int> cols,
                               std::vector<double> vals) {
  if (cols.size() != vals.size())
    throw std::invalid_argument("TransitionMatrix::set_row: size mismatch");
  cols_[i] = std::move(cols);
  vals_[i] = std::move(vals);
}

double TransitionMatrix::row_sum_norm() const {
  double mx = 0.0;
  for (int i = 0; i < m_; ++i) {
    double s = 0.0;
    for (double v : vals_[i]) s += v;
    mx = std::max(mx, s);
  }
  return mx;
}

double TransitionMatrix::entry(int i, int j) const {
  for (std::size_t k = 0; k < cols_[i].size(); ++k)
    if (cols_[i][k] == j) return vals_[i][k];
  return 0.0;
}

void TransitionMatrix::require_stable() const {
  const double norm = row_sum_norm();
  if (norm >= 1.0)
    throw InstabilityError("transition matrix unstable: row-sum norm = " +
                           std::to_string(norm));
}

std::vector<double> TransitionMatrix::neumann_column(int source) const {
  require_stable();
  std::vector<double> total(m_, 0.0), term(m_, 0.0), next(m_);
  term[source] = 1.0;
  total[source] = 1.0;
  for (;;) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      const auto& c = cols_[i];
      const auto& v = vals_[i];
      for (std::size_t k = 0; k < c.size(); ++k) s += v[k] * term[c[k]];
      next[i] = s;
    }
    double inc = 0.0;
    for (int i = 0; i < m_; ++i) {
      total[i] += next[i];
      inc += std::abs(next[i]);
    }
    term.swap(next);
    if (inc < 1e-12) break;
  }
  return total;
}

std::vector<double> TransitionMatrix::neumann_row(
    const std::vector<double>& row) const {
  require_stable();
  std::vector<double> total(row), term(row), next(m_);
  for (;;) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      const double ti = term[i];
      if (ti == 0.0) continue;
      const auto& c = cols_[i];
      const auto& v = vals_[i];
      for (std::size_t k = 0; k < c.size(); ++k) next[c[k]] += ti * v[k];
    }
    double inc = 0.0;
    for (int i = 0; i < m_; ++i) {
      total[i] += next[i];
      inc += std::abs(next[i]);
    }
    term.swap(next);
    if (inc < 1e-12) break;
  }
  return total;
}

double TransitionMatrix::solve_influence(const std::vector<bool>& target_set,
                                         int source) const {
  const std::vector<double> col = neumann_column(source);
  double s = 0.0;
  for (int i = 0; i < m_; ++i)
    if (target_set[i]) s += col[i];
  return s;
}

}  // namespace gnhp

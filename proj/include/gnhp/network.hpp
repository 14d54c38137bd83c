#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnhp {

// Signals a transition matrix with row-sum norm >= 1 (infinite expected
// family size); callers distinguish this from generic failures.
class InstabilityError : public std::runtime_error {
 public:
  explicit InstabilityError(const std::string& what)
      : std::runtime_error(what) {}
};

// Directed network: edge i -> j means node i follows node j (a_ij = 1).
// No self loops. Out- and in-neighbor indexes are kept consistent.
class Network {
 public:
  explicit Network(int num_nodes);

  int size() const { return m_; }
  void add_edge(int src, int dst);  // src follows dst
  bool has_edge(int src, int dst) const;

  const std::vector<int>& out_neighbors(int i) const { return out_[i]; }
  const std::vector<int>& in_neighbors(int j) const { return in_[j]; }
  int out_degree(int i) const { return static_cast<int>(out_[i].size()); }

  // CSV with header "src,dst", 0-based ids.
  static Network load_edges_csv(const std::string& path);
  void save_edges_csv(const std::string& path) const;

 private:
  int m_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

// Stochastic block model: uniform block labels, directed edge with
// p_within inside a block, p_between across. Paper defaults:
// p_within = 0.3 m^{-0.3}, p_between = 0.3 m^{-0.8}.
Network generate_sbm(int m, int blocks, double p_within, double p_between,
                     std::mt19937_64& rng);
Network generate_sbm(int m, int blocks, std::mt19937_64& rng);

// Power-law follower counts: each node i draws f_i with
// P(f_i = f) proportional to f^{-exponent}, 1 <= f <= m-1, then gains f_i
// distinct followers chosen uniformly (edges follower -> i).
Network generate_power_law(int m, double exponent, std::mt19937_64& rng);

// Sparse row-compressed transition matrix
//   b_ij = phi_{g_i g_j} / d_i * a_ij + beta_{g_i} 1{i = j}.
// Stable iff the row-sum norm is < 1.
class TransitionMatrix {
 public:
  TransitionMatrix() : TransitionMatrix(0) {}
  explicit TransitionMatrix(int m);

  int size() const { return m_; }
  void set_row(int i, std::vector<int> cols, std::vector<double> vals);
  double row_sum_norm() const;
  bool stable() const { return row_sum_norm() < 1.0; }
  double entry(int i, int j) const;

  const std::vector<int>& row_cols(int i) const { return cols_[i]; }
  const std::vector<double>& row_vals(int i) const { return vals_[i]; }

  // (I - B)^{-1} e_source by the Neumann series; throws InstabilityError
  // when the row-sum norm is >= 1. Truncates when the increment's 1-norm
  // falls below 1e-12.
  std::vector<double> neumann_column(int source) const;

  // row^T (I - B)^{-1}, i.e. the transposed-system solve; `row` has size m.
  std::vector<double> neumann_row(const std::vector<double>& row) const;

  // e_S^T (I - B)^{-1} e_source: expected offspring count in S of a parent
  // at `source`.
  double solve_influence(const std::vector<bool>& target_set,
                         int source) const;

 private:
  void require_stable() const;

  int m_;
  std::vector<std::vector<int>> cols_;
  std::vector<std::vector<double>> vals_;
};

}  // namespace gnhp

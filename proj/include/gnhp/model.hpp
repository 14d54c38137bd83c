#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gnhp/kernels.hpp"
#include "gnhp/network.hpp"
#include "gnhp/splines.hpp"

namespace gnhp {

// Event streams: per-node sorted, strictly increasing times on [0, T].
struct EventData {
  std::vector<std::vector<double>> times;
  double horizon = 0.0;  // T, hours
  double period = 0.0;   // omega, hours

  int num_nodes() const { return static_cast<int>(times.size()); }
  std::size_t total_events() const;
  std::vector<int> counts() const;

  // Sorts each stream and breaks ties by +1e-9 * rank so ordering is strict.
  static EventData from_raw(std::vector<std::vector<double>> raw,
                            double horizon, double period);
};

// Group Network Hawkes Process parameterization. Group labels are 0-based.
// The rate parameters eta (momentum kernel) and gamma (network kernel) are
// per receiving group; phi[g][g'] scales influence of a group-g' parent on a
// group-g node, divided by the node's out-degree.
struct GnhpModel {
  PeriodicSplineBasis basis;
  int num_groups = 1;
  std::vector<std::vector<double>> weights;  // G x n_kt, >= floor
  std::vector<double> beta;                  // G, >= 0
  std::vector<double> eta;                   // G, > 0
  std::vector<double> gamma;                 // G, > 0
  std::vector<std::vector<double>> phi;      // G x G, >= 0
  std::vector<int> membership;               // m, values in [0, G)
  double truncation = 5.0;                   // kernel lag bound b, hours

  static constexpr double kWeightFloorEps = 1e-8;  // mu >= eps everywhere
  static constexpr double kRateCap = 100.0;        // eta/gamma upper bound

  double weight_floor() const { return kWeightFloorEps / basis.scale(); }
  double baseline(int g, double t) const;
  TriggeringKernel momentum_kernel(int g) const;
  TriggeringKernel network_kernel(int g) const;

  // Box bounds, floors, membership range; throws on violation.
  void validate(int expected_nodes = -1) const;

  std::string to_json() const;
  static GnhpModel from_json(const std::string& text);
  void save_json(const std::string& path) const;
  static GnhpModel load_json(const std::string& path);
};

// B from the model:  b_ij = phi_{g_i g_j} d_i^{-1} a_ij + beta_{g_i} 1{i=j}.
// Isolated nodes contribute only their diagonal term.
TransitionMatrix build_transition(const Network& net, const GnhpModel& model);

// Conditional intensity lambda_i(t | history before t); only events in
// (t - b, t) contribute (kernel truncation, located by binary search).
double intensity(const GnhpModel& model, const Network& net,
                 const EventData& data, int node, double t);

// Log-likelihood divided by m*T, with the compensator computed exactly.
double log_likelihood(const GnhpModel& model, const Network& net,
                      const EventData& data);

// The node term of the log-likelihood (divided by T), with the node's group
// overridden to `group` and per-neighbor interaction values `varphi`
// (varphi[k] multiplies kernel mass from out_neighbors(i)[k], before the
// d_i^{-1} scaling). Used by membership refinement.
double node_log_likelihood(const GnhpModel& model, const Network& net,
                           const EventData& data, int node, int group,
                           const std::vector<double>& varphi);

// Same with the model's own group / phi row.
double node_log_likelihood(const GnhpModel& model, const Network& net,
                           const EventData& data, int node);

// Analytic score of the log-likelihood and the plug-in information matrix
//   H = (mT)^{-1} sum_i sum_k  dlambda dlambda^T / lambda^2   at events,
// with memberships fixed. Parameter layout: [w_1..w_G | (beta,eta,gamma)_1..G
// | phi row-major], dimension G*n_kt + 3G + G^2.
struct ScoreResult {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd information;  // plug-in H
  int weight_dim = 0;           // G * n_kt, offset of the alpha block
};

ScoreResult score_and_hessian_plugin(const GnhpModel& model,
                                     const Network& net,
                                     const EventData& data);

// Covariance of the alpha block (theta, phi) per the sandwich
// Sigma = I_a H^{-1} I_a^T and standard errors sqrt(diag Sigma / (mT)).
struct CovarianceResult {
  Eigen::MatrixXd covariance;      // (3G+G^2) square
  std::vector<double> std_errors;  // same order as the alpha block
  double h_condition = 0.0;
  bool singular = false;
};

CovarianceResult alpha_covariance(const ScoreResult& score, int m, double T);

}  // namespace gnhp

#pragma once

#include <vector>

#include "gnhp/model.hpp"

namespace gnhp {

// Minimum-cost assignment (Hungarian algorithm) on a square cost matrix;
// returns assignment[row] = column.
std::vector<int> hungarian_assignment(
    const std::vector<std::vector<double>>& cost);

// Permutation mapping estimated group labels onto truth labels by matching
// (w, theta) distances; perm[est_g] = true_g. Requires equal group counts.
std::vector<int> match_groups(const GnhpModel& estimated,
                              const GnhpModel& truth);

// Group accuracy rate after optimal label permutation:
//   max_perm m^{-1} sum_i 1{ perm(est_i) = true_i }.
double group_accuracy_rate(const std::vector<int>& estimated,
                           const std::vector<int>& truth, int num_groups);

// Pseudo distance between two parameterizations sharing a network:
//   m^{-1} sum_i [ ||w'_{g'_i} - w_{g_i}|| + ||theta'_{g'_i} - theta_{g_i}||
//                  + ||varphi'_i - varphi_i|| ],
// with varphi_i = d_i^{-1/2} (phi_{g_i g_j})_{j in N_i}. Group counts may
// differ.
double pseudo_distance(const GnhpModel& a, const GnhpModel& b,
                       const Network& net);

// Scalar mis-specification metrics from the simulation study: per-node mean
// absolute deviation of a group-level parameter after refined assignment.
double pd_scalar(const std::vector<double>& est_param,
                 const std::vector<int>& est_membership,
                 const std::vector<double>& true_param,
                 const std::vector<int>& true_membership);

// PD_mu: per-node integrated absolute baseline error, averaged over nodes.
double pd_baseline(const GnhpModel& est, const GnhpModel& truth,
                   int quadrature_points = 2048);

// PD_B: sqrt( m^{-1} sum_{ij} a_ij (bhat_ij - b_ij)^2 ).
double pd_transition(const TransitionMatrix& est, const TransitionMatrix& tru,
                     const Network& net);

}  // namespace gnhp

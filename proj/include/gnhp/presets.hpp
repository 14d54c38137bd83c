#pragma once

#include <random>
#include <vector>

#include "gnhp/model.hpp"

namespace gnhp {

// Built-in three-group simulation design ("paper-t1"): periodic sinusoidal
// bump baselines with per-group peak locations and target per-period masses
// (1.5, 1, 0.5), momentum (beta, eta), network kernel rates gamma, and the
// 3x3 interaction matrix. Period 12 hours, kernel truncation 5 hours.
struct Table1Preset {
  static constexpr int kGroups = 3;
  static constexpr double kPeriod = 12.0;
  static constexpr double kTruncation = 5.0;

  // Analytic baseline nu_0 (1 + ratio * sum of sine bumps), calibrated so
  // the per-period integral hits the target exactly.
  static double baseline(int group, double t);
  static double baseline_integral(int group);  // over one period

  static const std::vector<double>& beta();
  static const std::vector<double>& eta();
  static const std::vector<double>& gamma();
  static const std::vector<std::vector<double>>& phi();
  static const std::vector<double>& group_proportions();  // (0.3, 0.4, 0.3)

  // Random membership with the preset proportions.
  static std::vector<int> sample_membership(int m, std::mt19937_64& rng);

  // Same, but resampled until the implied transition matrix is stable on
  // the given network. Sparse graphs can otherwise put every neighbor of a
  // beta = 0.4 node in the phi = 0.6 group, hitting a row sum of exactly 1.
  static std::vector<int> sample_stable_membership(const Network& net,
                                                   std::mt19937_64& rng,
                                                   int max_tries = 1000);

  // Truth model with baselines projected (least squares on a fine grid)
  // onto the given periodic basis, then rescaled so each per-period
  // integral matches the target exactly.
  static GnhpModel make_model(std::vector<int> membership, int spline_order,
                              int num_basis);
};

// Least-squares projection of an arbitrary periodic baseline onto a basis,
// clamped at the weight floor.
std::vector<double> project_baseline(const PeriodicSplineBasis& basis,
                                     const std::vector<double>& grid,
                                     const std::vector<double>& values);

}  // namespace gnhp

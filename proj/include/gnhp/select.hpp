#pragma once

#include <string>
#include <vector>

#include "gnhp/estimate.hpp"

namespace gnhp {

// Penalty weight (15T)^{-1} (median_i n_i)^{0.6} (mean_i d_i)^{0.25}; the
// optional knobs expose the alternative constant / mean-count form.
double lic_lambda(const EventData& data, const Network& net,
                  double denom_const = 15.0, bool median_counts = true);

struct LicEntry {
  int num_groups = 0;
  double loglik = 0.0;
  double penalty = 0.0;
  double lic = 0.0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

struct LicResult {
  std::vector<LicEntry> table;  // ascending in G
  std::vector<FitResult> fits;  // aligned with table; empty slot on failure
  int selected = 0;             // argmax LIC, ties to the smaller G
  double lambda = 0.0;

  void save_table_csv(const std::string& path) const;
};

// Fits every G in [g_min, g_max] (descending scan, warm-starting G-1 from a
// merged G fit) and selects argmax of LIC(G) = loglik - lambda * G.
LicResult select_groups(const Network& net, const EventData& data, int g_min,
                        int g_max, const EmConfig& config);

// Warm-start helper: collapse the closest pair of groups (squared parameter
// distance) into one, remapping memberships and averaging rows.
GnhpModel merge_closest_groups(const GnhpModel& model);

}  // namespace gnhp

#pragma once

#include <string>
#include <vector>

#include "gnhp/model.hpp"

namespace gnhp {

// Per-node influential power: column sums of (I - B)^{-1}, i.e. the expected
// network-wide family size of a parent event at each node. Always >= 1.
std::vector<double> node_influence(const TransitionMatrix& B);

struct GifCurve {
  int source_group = 0;
  int target_group = 0;
  std::vector<double> values;  // aligned with the shared time grid
};

struct InfluenceReport {
  std::vector<double> influence;              // per node
  std::vector<int> ranking;                   // node ids, descending power
  std::vector<std::vector<double>> group_matrix;  // [source][target] factors
  std::vector<double> grid;                   // time points in [0, omega]
  std::vector<GifCurve> curves;               // all ordered group pairs
};

// GIF_{gg'}(t) = e_{S_{g'}}^T (I - B)^{-1} e_{S_g} * mu_g(t) sampled on the
// grid. Default grid: 5-minute steps over one period.
std::vector<GifCurve> group_impact_curves(const GnhpModel& model,
                                          const Network& net,
                                          const TransitionMatrix& B,
                                          const std::vector<double>& grid);

InfluenceReport influence_report(const GnhpModel& model, const Network& net,
                                 const TransitionMatrix& B,
                                 double grid_step_hours = 5.0 / 60.0);

// CSV emitters: "node,group,influence" (ranking order) and
// "t,source_group,target_group,gif".
void save_ranking_csv(const InfluenceReport& report, const GnhpModel& model,
                      const std::string& path);
void save_gif_csv(const InfluenceReport& report, const std::string& path);

}  // namespace gnhp

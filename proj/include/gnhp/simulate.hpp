#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnhp/model.hpp"

namespace gnhp {

// One simulated event with optional branching provenance. parent_node /
// parent_index are -1 for root (background) events.
struct EventRecord {
  int node = 0;
  double time = 0.0;
  int parent_node = -1;
  int parent_index = -1;  // index into the parent node's sorted stream
  int generation = 0;
  int family = -1;  // root family id
};

struct SimulatedEvents {
  EventData data;
  std::vector<EventRecord> records;  // sorted by (node, time)
  bool has_provenance = false;

  // CSV "node,time[,parent_node,parent_index,generation]"; times printed
  // with 9 decimals.
  void save_csv(const std::string& path, bool with_provenance) const;
  // num_nodes pads trailing empty streams; -1 infers from the max node id.
  static SimulatedEvents load_csv(const std::string& path, double horizon,
                                  double period, int num_nodes = -1);
};

struct SimulateOptions {
  std::size_t max_events = 1000000;  // per-replicate cap, hard error
};

// Exact simulation via the branching construction: background parents from
// inhomogeneous Poisson(mu_{g_i}) by thinning; offspring recursively by
// per-event Poisson counts right-censored at T. Rejects unstable models.
SimulatedEvents simulate_branching(const GnhpModel& model, const Network& net,
                                   double horizon, std::uint64_t seed,
                                   const SimulateOptions& opts = {});

// Independent cross-check: Ogata-style modified thinning over the pooled
// process. No provenance labels.
SimulatedEvents simulate_thinning(const GnhpModel& model, const Network& net,
                                  double horizon, std::uint64_t seed,
                                  const SimulateOptions& opts = {});

}  // namespace gnhp

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gnhp/model.hpp"

namespace gnhp {

// Posterior parent distribution for one event: background probability plus
// a sparse map over candidate parents inside the truncation window.
struct ParentCandidate {
  int parent_node = 0;
  int parent_index = 0;
  double prob = 0.0;
};

struct EventPosterior {
  double background = 1.0;
  std::vector<ParentCandidate> parents;
};

struct Responsibilities {
  std::vector<std::vector<EventPosterior>> events;  // [node][event]
};

enum class MStepMode { kHardMembership, kFixedMembership };

struct EmConfig {
  int num_groups = 1;
  int spline_order = 4;
  int num_basis = 36;
  double truncation = 5.0;
  int max_iterations = 500;
  double loglik_rel_tol = 1e-6;
  double inner_rel_tol = 1e-8;   // multiplicative weight updates
  double search_tol = 1e-8;      // golden-section, relative
  double rate_lower = 1e-6;
  double rate_upper = 100.0;     // eta/gamma cap
  int n_starts = 20;
  int kmeans_restarts = 20;
  int stochastic_init_iters = 50;
  std::uint64_t seed = 0;
  bool update_memberships = true;  // hard reassignment during EM
  bool compute_covariance = true;
  // Refinement threshold; negative selects the data-driven rule
  // (2/G) * sum of per-group loglik standard deviations. Zero switches on
  // any strict profile improvement, which tests markedly better at G = 3.
  double refine_threshold = 0.0;
  int refine_rounds = 3;  // refine / refit alternations (stops when stable)
  const GnhpModel* warm_start = nullptr;  // extra start, not owned
};

struct FitResult {
  GnhpModel model;  // refit at the refined memberships
  std::vector<int> refined_membership;
  std::vector<std::vector<double>> refined_phi;  // per node, per out-neighbor
  TransitionMatrix refined_transition;
  std::vector<double> loglik_trace;  // observed, per outer iteration
  double loglik = 0.0;
  CovarianceResult covariance;
  bool converged = false;
  int iterations = 0;
  std::vector<int> frozen_groups;  // emptied groups kept with frozen params
};

// Posterior parent probabilities under the current model; background mass
// is proportional to mu_{g_i}(t_ik), own-parent mass to beta * f, neighbor
// mass to phi/d * f, restricted to the truncation window.
Responsibilities e_step(const GnhpModel& model, const Network& net,
                        const EventData& data);

// One M-step: optional hard membership reassignment, then weights by
// multiplicative ascent, (beta, eta) by profile search, (gamma, phi row) by
// profile search with closed-form phi ratios.
GnhpModel m_step(const Responsibilities& resp, const EventData& data,
                 const Network& net, const GnhpModel& model_in,
                 MStepMode mode, const EmConfig& config,
                 std::vector<int>* frozen_groups = nullptr);

// K-means over per-node activity features plus a short stochastic-EM
// polish; deterministic given the rng.
GnhpModel initialize(const Network& net, const EventData& data,
                     const EmConfig& config, std::mt19937_64& rng);

// Per-node profile-likelihood relabeling with the restricted interaction
// search set, switch threshold (2/G) sum of per-group loglik sds.
struct RefinementResult {
  std::vector<int> membership;
  std::vector<std::vector<double>> phi;  // per node, per out-neighbor
  TransitionMatrix transition;
  int switches = 0;
};

RefinementResult refine_memberships(const GnhpModel& model, const Network& net,
                                    const EventData& data,
                                    std::optional<double> threshold = {});

// Full pipeline: multi-start EM, refinement, fixed-membership refit,
// covariance.
FitResult fit(const Network& net, const EventData& data,
              const EmConfig& config);

// Complete-data log-likelihood pieces for hard parent assignments
// (parent_node/parent_index per event, -1 for background), matching the
// branching decomposition into background / momentum / network parts.
struct CompleteDataLoglik {
  double background = 0.0;
  double momentum = 0.0;
  double network = 0.0;
  double total() const { return background + momentum + network; }
};

CompleteDataLoglik complete_data_loglik(
    const GnhpModel& model, const Network& net, const EventData& data,
    const std::vector<std::vector<std::pair<int, int>>>& parents);

}  // namespace gnhp

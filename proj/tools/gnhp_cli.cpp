// gnhp command line front end: simulate / fit / select / influence /
// replicate. Machine-readable output goes to files, progress to stderr.
// Exit codes: 0 ok, 2 data error, 3 instability, 4 non-convergence.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gnhp/estimate.hpp"
#include "gnhp/influence.hpp"
#include "gnhp/io.hpp"
#include "gnhp/matching.hpp"
#include "gnhp/model.hpp"
#include "gnhp/network.hpp"
#include "gnhp/presets.hpp"
#include "gnhp/rng.hpp"
#include "gnhp/select.hpp"
#include "gnhp/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitInstability = 3;
constexpr int kExitNoConverge = 4;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

gnhp::Network make_network(const std::string& kind, const std::string& edges,
                           int m, std::uint64_t seed) {
  if (!edges.empty()) return gnhp::Network::load_edges_csv(edges);
  auto rng = gnhp::substream(seed, 1);
  if (kind == "sbm") return gnhp::generate_sbm(m, 3, rng);
  if (kind == "power-law") return gnhp::generate_power_law(m, 2.0, rng);
  throw DataError("unknown network kind: " + kind);
}

// Events files don't carry T; when the flag is omitted round the last
// event time up to a whole number of periods.
gnhp::SimulatedEvents load_events(const std::string& path, double horizon,
                                  double omega, int num_nodes) {
  if (horizon > 0.0)
    return gnhp::SimulatedEvents::load_csv(path, horizon, omega, num_nodes);
  auto sim = gnhp::SimulatedEvents::load_csv(
      path, std::numeric_limits<double>::max(), omega, num_nodes);
  double last = 0.0;
  for (const auto& stream : sim.data.times)
    if (!stream.empty()) last = std::max(last, stream.back());
  sim.data.horizon = std::max(omega, std::ceil(last / omega) * omega);
  return sim;
}

gnhp::EmConfig config_from_file(const std::string& path) {
  gnhp::EmConfig cfg;
  if (path.empty()) return cfg;
  auto kv = gnhp::KeyValueConfig::load(path);
  cfg.spline_order = kv.get_int("spline_order", cfg.spline_order);
  cfg.num_basis = kv.get_int("num_basis", cfg.num_basis);
  cfg.truncation = kv.get_double("truncation", cfg.truncation);
  cfg.max_iterations = kv.get_int("max_iterations", cfg.max_iterations);
  cfg.loglik_rel_tol = kv.get_double("loglik_rel_tol", cfg.loglik_rel_tol);
  cfg.inner_rel_tol = kv.get_double("inner_rel_tol", cfg.inner_rel_tol);
  cfg.search_tol = kv.get_double("search_tol", cfg.search_tol);
  cfg.rate_upper = kv.get_double("rate_upper", cfg.rate_upper);
  cfg.n_starts = kv.get_int("n_starts", cfg.n_starts);
  cfg.kmeans_restarts = kv.get_int("kmeans_restarts", cfg.kmeans_restarts);
  cfg.stochastic_init_iters =
      kv.get_int("stochastic_init_iters", cfg.stochastic_init_iters);
  cfg.update_memberships =
      kv.get_bool("update_memberships", cfg.update_memberships);
  cfg.compute_covariance =
      kv.get_bool("compute_covariance", cfg.compute_covariance);
  cfg.refine_threshold = kv.get_double("refine_threshold", cfg.refine_threshold);
  cfg.refine_rounds = kv.get_int("refine_rounds", cfg.refine_rounds);
  return cfg;
}

// Permutation est -> truth by maximum label overlap (Hungarian on the
// negated confusion matrix). Groups never observed map to themselves.
std::vector<int> confusion_permutation(const std::vector<int>& est,
                                       const std::vector<int>& truth, int G) {
  std::vector<std::vector<double>> cost(G, std::vector<double>(G, 0.0));
  for (std::size_t i = 0; i < est.size(); ++i) cost[est[i]][truth[i]] -= 1.0;
  return gnhp::hungarian_assignment(cost);
}

void write_baseline_csv(const gnhp::GnhpModel& model, const std::string& path,
                        double step) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "t,group,mu\n";
  const double omega = model.basis.period();
  for (double t = 0.0; t < omega + 0.5 * step; t += step) {
    double tt = std::min(t, omega);
    for (int g = 0; g < model.num_groups; ++g)
      out << tt << ',' << g << ',' << model.baseline(g, tt) << '\n';
  }
}

double wald_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));  // two-sided
}

void write_se_csv(const gnhp::FitResult& res, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "param,group,group2,estimate,se,z,p\n";
  const auto& m = res.model;
  const auto& se = res.covariance.std_errors;
  const int G = m.num_groups;
  auto row = [&](const std::string& name, int g, int gp, double est,
                 std::size_t idx) {
    double s = idx < se.size() ? se[idx] : 0.0;
    double z = s > 0.0 ? est / s : 0.0;
    out << name << ',' << g << ',';
    if (gp >= 0) out << gp;
    out << ',' << est << ',' << s << ',' << z << ',' << wald_p(z) << '\n';
  };
  for (int g = 0; g < G; ++g) {
    row("beta", g, -1, m.beta[g], 3 * g);
    row("eta", g, -1, m.eta[g], 3 * g + 1);
    row("gamma", g, -1, m.gamma[g], 3 * g + 2);
  }
  for (int g = 0; g < G; ++g)
    for (int gp = 0; gp < G; ++gp)
      row("phi", g, gp, m.phi[g][gp], 3 * G + g * G + gp);
}

void write_diagnostics(const gnhp::FitResult& res, const std::string& path,
                       double gar) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "{\n  \"loglik\": " << res.loglik
      << ",\n  \"converged\": " << (res.converged ? "true" : "false")
      << ",\n  \"iterations\": " << res.iterations << ",\n  \"trace\": [";
  for (std::size_t i = 0; i < res.loglik_trace.size(); ++i)
    out << (i ? "," : "") << res.loglik_trace[i];
  out << "],\n  \"frozen_groups\": [";
  for (std::size_t i = 0; i < res.frozen_groups.size(); ++i)
    out << (i ? "," : "") << res.frozen_groups[i];
  out << "]";
  if (gar >= 0.0) out << ",\n  \"gar\": " << gar;
  out << "\n}\n";
}

void save_membership_csv(const std::vector<int>& memb,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "node,group\n";
  for (std::size_t i = 0; i < memb.size(); ++i)
    out << i << ',' << memb[i] << '\n';
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string preset = "paper-t1";
  std::string model_path;
  std::string network = "sbm";
  std::string edges;
  int m = 100;
  double horizon = 240.0;
  double omega = 12.0;
  std::uint64_t seed = 0;
  int num_basis = 36;
  int spline_order = 4;
  bool provenance = false;
  std::string out = "events.csv";
  std::string truth_out;
  std::string network_out;
};

int cmd_simulate(const SimulateArgs& a) {
  gnhp::Network net = make_network(a.network, a.edges, a.m, a.seed);
  auto build_model = [&]() -> gnhp::GnhpModel {
    if (!a.model_path.empty()) return gnhp::GnhpModel::load_json(a.model_path);
    if (a.preset != "paper-t1") throw DataError("unknown preset: " + a.preset);
    auto rng = gnhp::substream(a.seed, 2);
    auto memb = gnhp::Table1Preset::sample_stable_membership(net, rng);
    return gnhp::Table1Preset::make_model(std::move(memb), a.spline_order,
                                          a.num_basis);
  };
  gnhp::GnhpModel model = build_model();
  model.validate(net.size());
  auto sim = gnhp::simulate_branching(model, net, a.horizon,
                                      gnhp::substream(a.seed, 3)());
  sim.save_csv(a.out, a.provenance);
  if (!a.truth_out.empty()) model.save_json(a.truth_out);
  if (!a.network_out.empty()) net.save_edges_csv(a.network_out);
  std::cerr << "simulate: " << sim.data.total_events() << " events on "
            << net.size() << " nodes, T=" << a.horizon << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string events;
  std::string edges;
  int groups = 1;
  double horizon = 0.0;
  double omega = 12.0;
  std::uint64_t seed = 0;
  std::string config;
  int n_starts = -1;
  int num_basis = -1;
  std::string out = "model.json";
  std::string diagnostics;
  std::string baseline_csv;
  std::string se_csv;
  std::string membership_csv;
  std::string truth;
};

int cmd_fit(const FitArgs& a) {
  gnhp::Network net = gnhp::Network::load_edges_csv(a.edges);
  auto sim = load_events(a.events, a.horizon, a.omega, net.size());
  gnhp::EmConfig cfg = config_from_file(a.config);
  cfg.num_groups = a.groups;
  cfg.seed = a.seed;
  if (a.n_starts > 0) cfg.n_starts = a.n_starts;
  if (a.num_basis > 0) cfg.num_basis = a.num_basis;
  auto res = gnhp::fit(net, sim.data, cfg);
  res.model.save_json(a.out);
  double gar = -1.0;
  if (!a.truth.empty()) {
    auto truth = gnhp::GnhpModel::load_json(a.truth);
    gar = gnhp::group_accuracy_rate(res.refined_membership, truth.membership,
                                    std::max(a.groups, truth.num_groups));
  }
  if (!a.diagnostics.empty()) write_diagnostics(res, a.diagnostics, gar);
  if (!a.baseline_csv.empty())
    write_baseline_csv(res.model, a.baseline_csv, a.omega / 288.0);
  if (!a.se_csv.empty()) write_se_csv(res, a.se_csv);
  if (!a.membership_csv.empty())
    save_membership_csv(res.refined_membership, a.membership_csv);
  std::cerr << "fit: loglik " << res.loglik << ", " << res.iterations
            << " iterations" << (res.converged ? "" : " (not converged)");
  if (gar >= 0.0) std::cerr << ", GAR " << gar;
  std::cerr << "\n";
  return res.converged ? kExitOk : kExitNoConverge;
}

// ------------------------------------------------------------------ select

struct SelectArgs {
  std::string events;
  std::string edges;
  int g_min = 1;
  int g_max = 5;
  double horizon = 0.0;
  double omega = 12.0;
  std::uint64_t seed = 0;
  std::string config;
  int n_starts = -1;
  int num_basis = -1;
  std::string out = "lic.csv";
  std::string model_out;
};

int cmd_select(const SelectArgs& a) {
  gnhp::Network net = gnhp::Network::load_edges_csv(a.edges);
  auto sim = load_events(a.events, a.horizon, a.omega, net.size());
  gnhp::EmConfig cfg = config_from_file(a.config);
  cfg.seed = a.seed;
  if (a.n_starts > 0) cfg.n_starts = a.n_starts;
  if (a.num_basis > 0) cfg.num_basis = a.num_basis;
  auto res = gnhp::select_groups(net, sim.data, a.g_min, a.g_max, cfg);
  res.save_table_csv(a.out);
  if (!a.model_out.empty()) {
    for (std::size_t i = 0; i < res.table.size(); ++i)
      if (res.table[i].num_groups == res.selected && !res.table[i].failed)
        res.fits[i].model.save_json(a.model_out);
  }
  std::cerr << "select: G = " << res.selected << " (lambda " << res.lambda
            << ")\n";
  return kExitOk;
}

// --------------------------------------------------------------- influence

struct InfluenceArgs {
  std::string model_path;
  std::string edges;
  double grid_step = 5.0 / 60.0;
  std::string ranking = "influence.csv";
  std::string gif;
};

int cmd_influence(const InfluenceArgs& a) {
  gnhp::Network net = gnhp::Network::load_edges_csv(a.edges);
  auto model = gnhp::GnhpModel::load_json(a.model_path);
  model.validate(net.size());
  auto B = gnhp::build_transition(net, model);
  auto report = gnhp::influence_report(model, net, B, a.grid_step);
  gnhp::save_ranking_csv(report, model, a.ranking);
  if (!a.gif.empty()) gnhp::save_gif_csv(report, a.gif);
  std::cerr << "influence: top node " << report.ranking.front() << " (power "
            << report.influence[report.ranking.front()] << ")\n";
  return kExitOk;
}

// --------------------------------------------------------------- replicate

struct ReplicateArgs {
  std::string preset = "paper-t1";
  std::string network = "sbm";
  int m = 100;
  double horizon = 240.0;
  double omega = 12.0;
  int replicates = 20;
  int groups = 3;
  std::uint64_t seed = 0;
  std::string config;
  int n_starts = -1;
  int num_basis = -1;
  int jobs = 1;
  bool do_select = false;
  int g_min = 2;
  int g_max = 5;
  std::string out = "summary.csv";
  std::string per_rep;
};

struct RepMetrics {
  bool failed = false;
  std::string error;
  double gar = 0.0;
  std::vector<double> se_beta, se_eta, se_gamma;        // squared errors, per g
  std::vector<std::vector<double>> se_phi;              // squared, per (g,g')
  std::vector<int> cov_beta, cov_eta, cov_gamma;        // CI covers truth
  double pd_beta = 0.0, pd_mu = 0.0, pd_b = 0.0;
  int selected = 0;
};

RepMetrics run_replicate(const ReplicateArgs& a, int rep) {
  RepMetrics mres;
  const int G = gnhp::Table1Preset::kGroups;
  auto net_rng = gnhp::substream(a.seed, 100, rep);
  gnhp::Network net =
      a.network == "sbm"
          ? gnhp::generate_sbm(a.m, 3, net_rng)
          : gnhp::generate_power_law(a.m, 2.0, net_rng);
  auto memb_rng = gnhp::substream(a.seed, 101, rep);
  auto memb = gnhp::Table1Preset::sample_stable_membership(net, memb_rng);
  int nb = a.num_basis > 0 ? a.num_basis : 24;
  gnhp::GnhpModel truth = gnhp::Table1Preset::make_model(memb, 4, nb);
  auto sim = gnhp::simulate_branching(truth, net, a.horizon,
                                      gnhp::substream(a.seed, 102, rep)());

  gnhp::EmConfig cfg = config_from_file(a.config);
  cfg.num_groups = a.groups;
  cfg.num_basis = nb;
  cfg.seed = gnhp::substream(a.seed, 103, rep)();
  if (a.n_starts > 0) cfg.n_starts = a.n_starts;
  auto res = gnhp::fit(net, sim.data, cfg);

  mres.gar = gnhp::group_accuracy_rate(res.refined_membership, memb,
                                       std::max(a.groups, G));
  mres.pd_mu = gnhp::pd_baseline(res.model, truth);
  mres.pd_b = gnhp::pd_transition(res.refined_transition,
                                  gnhp::build_transition(net, truth), net);
  mres.pd_beta = gnhp::pd_scalar(res.model.beta, res.refined_membership,
                                 truth.beta, memb);

  if (a.groups == G) {
    auto perm = confusion_permutation(res.refined_membership, memb, G);
    mres.se_beta.assign(G, 0.0);
    mres.se_eta.assign(G, 0.0);
    mres.se_gamma.assign(G, 0.0);
    mres.se_phi.assign(G, std::vector<double>(G, 0.0));
    mres.cov_beta.assign(G, 0);
    mres.cov_eta.assign(G, 0);
    mres.cov_gamma.assign(G, 0);
    const auto& se = res.covariance.std_errors;
    auto covers = [&](double est, double tru, std::size_t idx) {
      if (idx >= se.size() || se[idx] <= 0.0) return 0;
      return std::abs(est - tru) <= 1.959963985 * se[idx] ? 1 : 0;
    };
    for (int g = 0; g < G; ++g) {
      int t = perm[g];  // estimated group g corresponds to true group t
      double db = res.model.beta[g] - truth.beta[t];
      double de = res.model.eta[g] - truth.eta[t];
      double dg = res.model.gamma[g] - truth.gamma[t];
      mres.se_beta[t] = db * db;
      mres.se_eta[t] = de * de;
      mres.se_gamma[t] = dg * dg;
      mres.cov_beta[t] = covers(res.model.beta[g], truth.beta[t], 3 * g);
      mres.cov_eta[t] = covers(res.model.eta[g], truth.eta[t], 3 * g + 1);
      mres.cov_gamma[t] = covers(res.model.gamma[g], truth.gamma[t], 3 * g + 2);
      for (int gp = 0; gp < G; ++gp) {
        double dp = res.model.phi[g][gp] - truth.phi[t][perm[gp]];
        mres.se_phi[t][perm[gp]] = dp * dp;
      }
    }
  }

  if (a.do_select) {
    gnhp::EmConfig scfg = cfg;
    auto sel = gnhp::select_groups(net, sim.data, a.g_min, a.g_max, scfg);
    mres.selected = sel.selected;
  }
  return mres;
}

int cmd_replicate(const ReplicateArgs& a) {
  if (a.preset != "paper-t1") throw DataError("unknown preset: " + a.preset);
  const int G = gnhp::Table1Preset::kGroups;
  std::vector<RepMetrics> reps(a.replicates);
  std::atomic<int> next{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    for (;;) {
      int rep = next.fetch_add(1);
      if (rep >= a.replicates) return;
      try {
        reps[rep] = run_replicate(a, rep);
      } catch (const std::exception& e) {
        reps[rep].failed = true;
        reps[rep].error = e.what();
      }
      std::lock_guard<std::mutex> lk(log_mutex);
      std::cerr << "replicate " << rep << ": "
                << (reps[rep].failed ? reps[rep].error
                                     : "GAR " + std::to_string(reps[rep].gar))
                << "\n";
    }
  };
  int jobs = std::max(1, a.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<const RepMetrics*> ok;
  for (const auto& r : reps)
    if (!r.failed) ok.push_back(&r);
  if (ok.empty()) throw DataError("replicate: every replicate failed");
  const double K = static_cast<double>(ok.size());

  std::ofstream out(a.out);
  if (!out) throw DataError("cannot write " + a.out);
  out << "metric,group,group2,value\n";
  auto emit = [&](const std::string& name, int g, int gp, double v) {
    out << name << ',';
    if (g >= 0) out << g;
    out << ',';
    if (gp >= 0) out << gp;
    out << ',' << v << '\n';
  };
  double gar = 0.0, pdb = 0.0, pdm = 0.0, pdt = 0.0;
  for (const auto* r : ok) {
    gar += r->gar;
    pdb += r->pd_beta;
    pdm += r->pd_mu;
    pdt += r->pd_b;
  }
  emit("gar", -1, -1, gar / K);
  emit("pd_beta", -1, -1, pdb / K);
  emit("pd_mu", -1, -1, pdm / K);
  emit("pd_B", -1, -1, pdt / K);
  if (a.groups == G && !ok.front()->se_beta.empty()) {
    for (int g = 0; g < G; ++g) {
      double sb = 0, se = 0, sg = 0, cb = 0, ce = 0, cg = 0;
      for (const auto* r : ok) {
        sb += r->se_beta[g];
        se += r->se_eta[g];
        sg += r->se_gamma[g];
        cb += r->cov_beta[g];
        ce += r->cov_eta[g];
        cg += r->cov_gamma[g];
      }
      emit("rmse_beta", g, -1, std::sqrt(sb / K));
      emit("rmse_eta", g, -1, std::sqrt(se / K));
      emit("rmse_gamma", g, -1, std::sqrt(sg / K));
      emit("coverage_beta", g, -1, cb / K);
      emit("coverage_eta", g, -1, ce / K);
      emit("coverage_gamma", g, -1, cg / K);
      for (int gp = 0; gp < G; ++gp) {
        double sp = 0;
        for (const auto* r : ok) sp += r->se_phi[g][gp];
        emit("rmse_phi", g, gp, std::sqrt(sp / K));
      }
    }
  }
  if (a.do_select) {
    for (int g = a.g_min; g <= a.g_max; ++g) {
      double cnt = 0;
      for (const auto* r : ok) cnt += (r->selected == g) ? 1 : 0;
      emit("sr", g, -1, cnt / K);
    }
  }
  emit("failures", -1, -1, static_cast<double>(a.replicates) - K);

  if (!a.per_rep.empty()) {
    std::ofstream pr(a.per_rep);
    if (!pr) throw DataError("cannot write " + a.per_rep);
    pr << "rep,failed,gar,pd_beta,pd_mu,pd_B,selected\n";
    for (int r = 0; r < a.replicates; ++r)
      pr << r << ',' << (reps[r].failed ? 1 : 0) << ',' << reps[r].gar << ','
         << reps[r].pd_beta << ',' << reps[r].pd_mu << ',' << reps[r].pd_b
         << ',' << reps[r].selected << '\n';
  }
  std::cerr << "replicate: " << ok.size() << "/" << a.replicates
            << " succeeded, mean GAR " << gar / K << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group network Hawkes process toolkit"};
  app.require_subcommand(1);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "simulate event streams");
  sim->add_option("--preset", sa.preset, "built-in design (paper-t1)");
  sim->add_option("--model", sa.model_path, "truth model JSON");
  sim->add_option("--network", sa.network, "sbm | power-law");
  sim->add_option("--edges", sa.edges, "load network from edges CSV");
  sim->add_option("--m", sa.m, "number of nodes");
  sim->add_option("--T", sa.horizon, "horizon, hours");
  sim->add_option("--omega", sa.omega, "period, hours");
  sim->add_option("--seed", sa.seed)->required();
  sim->add_option("--num-basis", sa.num_basis, "spline basis size");
  sim->add_flag("--provenance", sa.provenance, "emit branching provenance");
  sim->add_option("--out", sa.out, "events CSV");
  sim->add_option("--truth-out", sa.truth_out, "truth model JSON out");
  sim->add_option("--network-out", sa.network_out, "edges CSV out");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "maximum likelihood fit");
  fit->add_option("--events", fa.events)->required();
  fit->add_option("--edges", fa.edges)->required();
  fit->add_option("--groups", fa.groups, "number of latent groups");
  fit->add_option("--T", fa.horizon, "horizon (0: infer from data)");
  fit->add_option("--omega", fa.omega, "period, hours");
  fit->add_option("--seed", fa.seed);
  fit->add_option("--config", fa.config, "key=value overrides file");
  fit->add_option("--starts", fa.n_starts, "number of EM starts");
  fit->add_option("--num-basis", fa.num_basis, "spline basis size");
  fit->add_option("--out", fa.out, "fitted model JSON");
  fit->add_option("--diagnostics", fa.diagnostics, "diagnostics JSON");
  fit->add_option("--baseline-csv", fa.baseline_csv);
  fit->add_option("--se-csv", fa.se_csv, "standard error / p-value table");
  fit->add_option("--membership-csv", fa.membership_csv);
  fit->add_option("--truth", fa.truth, "truth model JSON, reports GAR");

  SelectArgs la;
  auto* sel = app.add_subcommand("select", "choose G by the LIC");
  sel->add_option("--events", la.events)->required();
  sel->add_option("--edges", la.edges)->required();
  sel->add_option("--gmin", la.g_min);
  sel->add_option("--gmax", la.g_max);
  sel->add_option("--T", la.horizon, "horizon (0: infer from data)");
  sel->add_option("--omega", la.omega);
  sel->add_option("--seed", la.seed);
  sel->add_option("--config", la.config);
  sel->add_option("--starts", la.n_starts);
  sel->add_option("--num-basis", la.num_basis);
  sel->add_option("--out", la.out, "LIC table CSV");
  sel->add_option("--model-out", la.model_out, "selected model JSON");

  InfluenceArgs ia;
  auto* inf = app.add_subcommand("influence", "rankings and impact curves");
  inf->add_option("--model", ia.model_path)->required();
  inf->add_option("--edges", ia.edges)->required();
  inf->add_option("--grid-step", ia.grid_step, "curve grid step, hours");
  inf->add_option("--ranking", ia.ranking, "ranking CSV");
  inf->add_option("--gif", ia.gif, "impact curve CSV");

  ReplicateArgs ra;
  auto* rep = app.add_subcommand("replicate", "seeded simulation study");
  rep->add_option("--preset", ra.preset);
  rep->add_option("--network", ra.network, "sbm | power-law");
  rep->add_option("--m", ra.m);
  rep->add_option("--T", ra.horizon);
  rep->add_option("--omega", ra.omega);
  rep->add_option("--K", ra.replicates, "replicate count");
  rep->add_option("--groups", ra.groups, "fitted G");
  rep->add_option("--seed", ra.seed)->required();
  rep->add_option("--config", ra.config);
  rep->add_option("--starts", ra.n_starts);
  rep->add_option("--num-basis", ra.num_basis);
  rep->add_option("--jobs", ra.jobs, "worker threads");
  rep->add_flag("--select", ra.do_select, "also run LIC selection");
  rep->add_option("--gmin", ra.g_min);
  rep->add_option("--gmax", ra.g_max);
  rep->add_option("--out", ra.out, "summary CSV");
  rep->add_option("--per-rep", ra.per_rep, "per-replicate CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(sa);
    if (*fit) return cmd_fit(fa);
    if (*sel) return cmd_select(la);
    if (*inf) return cmd_influence(ia);
    if (*rep) return cmd_replicate(ra);
  } catch (const gnhp::InstabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInstability;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

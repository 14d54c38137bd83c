#include "gnhp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "gnhp/rng.hpp"

namespace gnhp {

namespace {

// Homogeneous Poisson(rate) arrival times on (0, horizon].
std::vector<double> poisson_times(double rate, double horizon,
                                  std::mt19937_64& rng) {
  std::vector<double> out;
  if (rate <= 0.0 || horizon <= 0.0) return out;
  std::exponential_distribution<double> exp_dist(rate);
  double t = exp_dist(rng);
  while (t <= horizon) {
    out.push_back(t);
    t += exp_dist(rng);
  }
  return out;
}

struct PendingEvent {
  int node;
  double time;
  int generation;
  int id;         // unique record id
  int parent_id;  // -1 for roots
  int family;
};

}  // namespace

SimulatedEvents simulate_branching(const GnhpModel& model, const Network& net,
                                   double horizon, std::uint64_t seed,
                                   const SimulateOptions& opts) {
  model.validate(net.size());
  const TransitionMatrix B = build_transition(net, model);
  if (!B.stable())
    throw InstabilityError("simulate_branching: row-sum norm = " +
                           std::to_string(B.row_sum_norm()));

  const int m = net.size();
  std::vector<PendingEvent> all;
  int next_id = 0;

  // Background parents: inhomogeneous Poisson by thinning against the
  // per-group sup bound.
  std::vector<PendingEvent> parents;
  for (int i = 0; i < m; ++i) {
    const int g = model.membership[i];
    const double bound = model.basis.sup_intensity(model.weights[g]);
    std::mt19937_64 rng = substream(seed, 1, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double t : poisson_times(bound, horizon, rng)) {
      if (unif(rng) * bound <= model.baseline(g, t))
        parents.push_back({i, t, 0, 0, -1, 0});
    }
  }
  std::sort(parents.begin(), parents.end(), [](const auto& a, const auto& b) {
    return a.time < b.time || (a.time == b.time && a.node < b.node);
  });

  // Offspring cascades, one independent substream per family.
  for (std::size_t fam = 0; fam < parents.size(); ++fam) {
    PendingEvent root = parents[fam];
    root.id = next_id++;
    root.family = static_cast<int>(fam);
    all.push_back(root);
    std::mt19937_64 rng = substream(seed, 2, fam);
    std::deque<PendingEvent> queue{root};
    while (!queue.empty()) {
      const PendingEvent ev = queue.front();
      queue.pop_front();
      const double window = horizon - ev.time;
      if (window <= 0.0) continue;
      const int gj = model.membership[ev.node];
      // Own-node (momentum) offspring.
      if (model.beta[gj] > 0.0) {
        const TriggeringKernel mk = model.momentum_kernel(gj);
        for (double lag :
             mk.sample_offspring_times(model.beta[gj], window, rng)) {
          PendingEvent child{ev.node, ev.time + lag, ev.generation + 1,
                             next_id++, ev.id, ev.family};
          all.push_back(child);
          queue.push_back(child);
        }
      }
      // Follower (network) offspring.
      for (int follower : net.in_neighbors(ev.node)) {
        const int gf = model.membership[follower];
        const double mult = model.phi[gf][gj] / net.out_degree(follower);
        if (mult <= 0.0) continue;
        const TriggeringKernel nk = model.network_kernel(gf);
        for (double lag : nk.sample_offspring_times(mult, window, rng)) {
          PendingEvent child{follower, ev.time + lag, ev.generation + 1,
                             next_id++, ev.id, ev.family};
          all.push_back(child);
          queue.push_back(child);
        }
      }
      if (all.size() > opts.max_events)
        throw std::runtime_error(
            "simulate_branching: event cap exceeded (" +
            std::to_string(opts.max_events) + ")");
    }
  }

  // Sort per (node, time), perturb ties, resolve parent indices.
  std::vector<int> order(all.size());
  for (std::size_t k = 0; k < all.size(); ++k) order[k] = static_cast<int>(k);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return all[a].node < all[b].node ||
           (all[a].node == all[b].node && all[a].time < all[b].time);
  });
  std::vector<int> index_of(all.size());          // record id -> stream index
  std::vector<std::vector<double>> raw(net.size());
  {
    int prev_node = -1;
    int pos = 0;
    for (int k : order) {
      auto& ev = all[k];
      if (ev.node != prev_node) {
        prev_node = ev.node;
        pos = 0;
      }
      if (!raw[ev.node].empty() && ev.time <= raw[ev.node].back())
        ev.time = raw[ev.node].back() + 1e-9;
      raw[ev.node].push_back(ev.time);
      index_of[ev.id] = pos++;
    }
  }

  SimulatedEvents out;
  out.has_provenance = true;
  out.data.times = std::move(raw);
  out.data.horizon = horizon;
  out.data.period = model.basis.period();
  out.records.reserve(all.size());
  for (int k : order) {
    const auto& ev = all[k];
    EventRecord rec;
    rec.node = ev.node;
    rec.time = ev.time;
    rec.generation = ev.generation;
    rec.family = ev.family;
    if (ev.parent_id >= 0) {
      rec.parent_node = all[ev.parent_id].node;
      rec.parent_index = index_of[ev.parent_id];
    }
    out.records.push_back(rec);
  }
  return out;
}

SimulatedEvents simulate_thinning(const GnhpModel& model, const Network& net,
                                  double horizon, std::uint64_t seed,
                                  const SimulateOptions& opts) {
  model.validate(net.size());
  const TransitionMatrix B = build_transition(net, model);
  if (!B.stable())
    throw InstabilityError("simulate_thinning: row-sum norm = " +
                           std::to_string(B.row_sum_norm()));

  const int m = net.size();
  std::vector<double> base_sup(m);
  for (int i = 0; i < m; ++i)
    base_sup[i] =
        model.basis.sup_intensity(model.weights[model.membership[i]]);

  EventData data;
  data.times.assign(m, {});
  data.horizon = horizon;
  data.period = model.basis.period();

  std::mt19937_64 rng = substream(seed, 3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> lam(m);
  std::size_t count = 0;

  double t = 0.0;
  while (t < horizon) {
    // Triggering parts are non-increasing between events, so the intensity
    // just after t with baselines replaced by their sup dominates. The
    // "just after" matters: intensity() is a left limit and would miss the
    // f(0) jump of an event accepted at exactly t.
    const double tp = t + 1e-9;
    double bar = 0.0;
    for (int i = 0; i < m; ++i) {
      const double li = intensity(model, net, data, i, tp);
      bar += li - model.baseline(model.membership[i], tp) + base_sup[i];
    }
    if (bar <= 0.0) break;
    t += std::exponential_distribution<double>(bar)(rng);
    if (t >= horizon) break;
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      lam[i] = intensity(model, net, data, i, t);
      total += lam[i];
    }
    if (unif(rng) * bar > total) continue;  // thin
    double pick = unif(rng) * total;
    int node = m - 1;
    for (int i = 0; i < m; ++i) {
      pick -= lam[i];
      if (pick <= 0.0) {
        node = i;
        break;
      }
    }
    data.times[node].push_back(t);
    if (++count > opts.max_events)
      throw std::runtime_error("simulate_thinning: event cap exceeded");
  }

  SimulatedEvents out;
  out.has_provenance = false;
  out.data = std::move(data);
  out.records.reserve(count);
  for (int i = 0; i < m; ++i)
    for (double s : out.data.times[i]) out.records.push_back({i, s});
  return out;
}

void SimulatedEvents::save_csv(const std::string& path,
                               bool with_provenance) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write events file: " + path);
  with_provenance = with_provenance && has_provenance;
  out << (with_provenance ? "node,time,parent_node,parent_index,generation"
                          : "node,time")
      << '\n';
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%.9f", r.node, r.time);
    out << buf;
    if (with_provenance)
      out << ',' << r.parent_node << ',' << r.parent_index << ','
          << r.generation;
    out << '\n';
  }
}

SimulatedEvents SimulatedEvents::load_csv(const std::string& path,
                                          double horizon, double period,
                                          int num_nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open events file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("node,time", 0) != 0)
    throw std::runtime_error("events file missing 'node,time' header: " +
                             path);
  const bool with_prov = line.find("parent_node") != std::string::npos;
  SimulatedEvents out;
  out.has_provenance = with_prov;
  int max_node = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    EventRecord rec;
    char c;
    ss >> rec.node >> c >> rec.time;
    if (with_prov)
      ss >> c >> rec.parent_node >> c >> rec.parent_index >> c >>
          rec.generation;
    if (!ss) throw std::runtime_error("malformed event line: " + line);
    max_node = std::max(max_node, rec.node);
    out.records.push_back(rec);
  }
  std::vector<std::vector<double>> raw(
      std::max(num_nodes, max_node + 1));
  for (const auto& r : out.records) raw[r.node].push_back(r.time);
  out.data = EventData::from_raw(std::move(raw), horizon, period);
  return out;
}

}  // namespace gnhp

#include "gnhp/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

#include "gnhp/presets.hpp"
#include "gnhp/rng.hpp"

namespace gnhp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTiny = 1e-12;

struct OwnPair {
  int l;
  double dt;
};

struct NbrPair {
  int j;
  int l;
  double dt;
};

struct EventCands {
  std::vector<OwnPair> own;
  std::vector<NbrPair> nbr;
};

// Window candidates plus per-node residual exposure, split into events whose
// residual window T - t already covers the full kernel support and the short
// tails near the horizon.
struct CandidateCache {
  std::vector<std::vector<EventCands>> ev;
  std::vector<int> full_count;
  std::vector<std::vector<double>> tails;
};

CandidateCache build_cache(const Network& net, const EventData& data,
                           double b) {
  const int m = data.num_nodes();
  const double T = data.horizon;
  CandidateCache cache;
  cache.ev.resize(m);
  cache.full_count.assign(m, 0);
  cache.tails.resize(m);
  for (int i = 0; i < m; ++i) {
    const auto& ts = data.times[i];
    cache.ev[i].resize(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double t = ts[k];
      auto& cand = cache.ev[i][k];
      for (int l = static_cast<int>(k) - 1; l >= 0 && t - ts[l] < b; --l) {
        cand.own.push_back({l, t - ts[l]});
      }
      for (int j : net.out_neighbors(i)) {
        const auto& tj = data.times[j];
        auto lo = std::upper_bound(tj.begin(), tj.end(), t - b);
        auto hi = std::lower_bound(tj.begin(), tj.end(), t);
        for (auto it = lo; it != hi; ++it) {
          cand.nbr.push_back({j, static_cast<int>(it - tj.begin()), t - *it});
        }
      }
      const double resid = T - t;
      if (resid >= b) {
        ++cache.full_count[i];
      } else {
        cache.tails[i].push_back(resid);
      }
    }
  }
  return cache;
}

double residual_mass(const CandidateCache& cache, int node,
                     const TriggeringKernel& kernel) {
  double r = static_cast<double>(cache.full_count[node]);
  for (double tail : cache.tails[node]) r += kernel.cumulative(tail);
  return r;
}

// Maximize f over [lo, hi] (golden section in log space).
double golden_max_log(const std::function<double(double)>& f, double lo,
                      double hi, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo), b = std::log(hi);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(std::exp(c));
  double fd = f(std::exp(d));
  while (b - a > std::max(tol, 1e-10)) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(std::exp(d));
    }
  }
  return fc > fd ? std::exp(c) : std::exp(d);
}

std::vector<TriggeringKernel> group_kernels(const std::vector<double>& rates,
                                            double b) {
  std::vector<TriggeringKernel> out;
  out.reserve(rates.size());
  for (double r : rates) out.emplace_back(std::max(r, 1e-12), b);
  return out;
}

Responsibilities e_step_cached(const GnhpModel& model, const Network& net,
                               const EventData& data,
                               const CandidateCache& cache) {
  const int m = data.num_nodes();
  const auto keta = group_kernels(model.eta, model.truncation);
  const auto kgam = group_kernels(model.gamma, model.truncation);
  Responsibilities resp;
  resp.events.resize(m);
  for (int i = 0; i < m; ++i) {
    const int g = model.membership[i];
    const int d = net.out_degree(i);
    const double invd = d > 0 ? 1.0 / d : 0.0;
    const auto& ts = data.times[i];
    resp.events[i].resize(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
      auto& post = resp.events[i][k];
      const auto& cand = cache.ev[i][k];
      double total = model.baseline(g, ts[k]);
      const double bg = total;
      post.parents.clear();
      if (model.beta[g] > 0.0) {
        for (const auto& p : cand.own) {
          const double mass = model.beta[g] * keta[g].density(p.dt);
          if (mass > 0.0) {
            post.parents.push_back({i, p.l, mass});
            total += mass;
          }
        }
      }
      for (const auto& p : cand.nbr) {
        const double ph = model.phi[g][model.membership[p.j]];
        if (ph <= 0.0) continue;
        const double mass = ph * invd * kgam[g].density(p.dt);
        if (mass > 0.0) {
          post.parents.push_back({p.j, p.l, mass});
          total += mass;
        }
      }
      post.background = bg / total;
      for (auto& p : post.parents) p.prob /= total;
    }
  }
  return resp;
}

// Posterior mass that node i's events put on each out-neighbor, aligned with
// out_neighbors(i).
std::vector<std::vector<double>> parent_masses(const Responsibilities& resp,
                                               const Network& net) {
  const int m = static_cast<int>(resp.events.size());
  std::vector<std::vector<double>> mass(m);
  for (int i = 0; i < m; ++i) {
    const auto& nb = net.out_neighbors(i);
    mass[i].assign(nb.size(), 0.0);
    for (const auto& post : resp.events[i]) {
      for (const auto& p : post.parents) {
        if (p.parent_node == i) continue;
        auto it = std::lower_bound(nb.begin(), nb.end(), p.parent_node);
        mass[i][it - nb.begin()] += p.prob;
      }
    }
  }
  return mass;
}

// Gauss-Seidel sweep of the hard membership update: each node is moved to
// the group maximizing its expected complete-data contribution, including
// the terms of followers whose interaction coefficient depends on this
// node's label.
void membership_sweep(const Responsibilities& resp, const EventData& data,
                      const Network& net, const CandidateCache& cache,
                      GnhpModel& model) {
  const int m = data.num_nodes();
  const int G = model.num_groups;
  const int r = model.basis.order();
  const auto keta = group_kernels(model.eta, model.truncation);
  const auto kgam = group_kernels(model.gamma, model.truncation);
  const auto xint = model.basis.integral_over(0.0, data.horizon);

  std::vector<double> wdotI(G, 0.0);
  for (int g = 0; g < G; ++g) {
    for (int j = 0; j < model.basis.num_basis(); ++j)
      wdotI[g] += model.weights[g][j] * xint[j];
  }
  std::vector<std::vector<double>> r_eta(G), r_gam(G);
  for (int g = 0; g < G; ++g) {
    r_eta[g].resize(m);
    r_gam[g].resize(m);
    for (int i = 0; i < m; ++i) {
      r_eta[g][i] = residual_mass(cache, i, keta[g]);
      r_gam[g][i] = residual_mass(cache, i, kgam[g]);
    }
  }
  const auto pmass = parent_masses(resp, net);

  std::vector<int> idx(r);
  std::vector<double> val(r);
  std::vector<double> score(G);
  auto& memb = model.membership;
  for (int i = 0; i < m; ++i) {
    const int d = net.out_degree(i);
    const double invd = d > 0 ? 1.0 / d : 0.0;
    const double logd = d > 0 ? std::log(static_cast<double>(d)) : 0.0;
    for (int g = 0; g < G; ++g) score[g] = -wdotI[g];

    const auto& ts = data.times[i];
    double own_mass = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto& post = resp.events[i][k];
      const auto& cand = cache.ev[i][k];
      if (post.background > kMassTiny) {
        model.basis.evaluate_local(ts[k], idx.data(), val.data());
        for (int g = 0; g < G; ++g) {
          double lam = 0.0;
          for (int a = 0; a < r; ++a) lam += model.weights[g][idx[a]] * val[a];
          score[g] += post.background * std::log(lam);
        }
      }
      // posterior parents and window candidates are in matched order: own
      // candidates first (when beta > 0), then neighbors with phi > 0, so we
      // walk the candidate lists with a probability lookup by (node, index).
      for (const auto& p : post.parents) {
        if (p.prob <= kMassTiny) continue;
        if (p.parent_node == i) {
          own_mass += p.prob;
          const double dt = ts[k] - ts[p.parent_index];
          for (int g = 0; g < G; ++g) {
            if (model.beta[g] <= 0.0) {
              score[g] = -kInf;
            } else if (score[g] > -kInf) {
              score[g] +=
                  p.prob * (std::log(model.beta[g]) +
                            std::log(keta[g].density(dt)));
            }
          }
        } else {
          const double dt = ts[k] - data.times[p.parent_node][p.parent_index];
          const int gj = memb[p.parent_node];
          for (int g = 0; g < G; ++g) {
            if (model.phi[g][gj] <= 0.0) {
              score[g] = -kInf;
            } else if (score[g] > -kInf) {
              score[g] += p.prob * (std::log(model.phi[g][gj]) - logd +
                                    std::log(kgam[g].density(dt)));
            }
          }
        }
      }
      (void)cand;
    }
    for (int g = 0; g < G; ++g) {
      if (score[g] == -kInf) continue;
      score[g] -= model.beta[g] * r_eta[g][i];
      for (int j : net.out_neighbors(i))
        score[g] -= invd * model.phi[g][memb[j]] * r_gam[g][j];
    }
    (void)own_mass;
    // follower terms: each in-neighbor j reads this node's label through
    // phi_{g_j, g} and the matching compensator piece.
    for (int j : net.in_neighbors(i)) {
      const int gj = memb[j];
      const auto& nb = net.out_neighbors(j);
      auto it = std::lower_bound(nb.begin(), nb.end(), i);
      const double mji = pmass[j][it - nb.begin()];
      const double invdj = 1.0 / static_cast<double>(net.out_degree(j));
      for (int g = 0; g < G; ++g) {
        if (score[g] == -kInf) continue;
        const double ph = model.phi[gj][g];
        if (mji > kMassTiny) {
          if (ph <= 0.0) {
            score[g] = -kInf;
            continue;
          }
          score[g] += mji * std::log(ph);
        }
        score[g] -= ph * invdj * r_gam[gj][i];
      }
    }
    int best = 0;
    for (int g = 1; g < G; ++g)
      if (score[g] > score[best]) best = g;
    memb[i] = best;
  }
}

}  // namespace

Responsibilities e_step(const GnhpModel& model, const Network& net,
                        const EventData& data) {
  const auto cache = build_cache(net, data, model.truncation);
  return e_step_cached(model, net, data, cache);
}

namespace {

GnhpModel m_step_cached(const Responsibilities& resp, const EventData& data,
                        const Network& net, const GnhpModel& model_in,
                        MStepMode mode, const EmConfig& config,
                        const CandidateCache& cache,
                        std::vector<int>* frozen_out) {
  GnhpModel model = model_in;
  const int m = data.num_nodes();
  const int G = model.num_groups;
  const int n_kt = model.basis.num_basis();
  const int r = model.basis.order();
  const double b = model.truncation;

  if (mode == MStepMode::kHardMembership)
    membership_sweep(resp, data, net, cache, model);

  std::vector<int> group_size(G, 0);
  for (int g : model.membership) ++group_size[g];
  std::vector<bool> frozen(G, false);
  for (int g = 0; g < G; ++g) {
    if (group_size[g] == 0) {
      frozen[g] = true;
      if (frozen_out) frozen_out->push_back(g);
    }
  }

  // Aggregates keyed by the (possibly updated) receiving group.
  struct BgEvent {
    double q;
    int idx[8];
    double val[8];
  };
  if (r > 8) throw std::invalid_argument("spline order above 8 unsupported");
  std::vector<std::vector<BgEvent>> bg(G);
  std::vector<std::vector<std::pair<double, double>>> own_pairs(G);  // dt, q
  std::vector<std::vector<std::pair<double, double>>> nbr_pairs(G);
  std::vector<std::vector<double>> cross_mass(G, std::vector<double>(G, 0.0));
  std::vector<double> own_full(G, 0.0);
  std::vector<std::vector<double>> own_tails(G);

  for (int i = 0; i < m; ++i) {
    const int g = model.membership[i];
    const auto& ts = data.times[i];
    own_full[g] += cache.full_count[i];
    own_tails[g].insert(own_tails[g].end(), cache.tails[i].begin(),
                        cache.tails[i].end());
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto& post = resp.events[i][k];
      if (post.background > 0.0) {
        BgEvent e;
        e.q = post.background;
        model.basis.evaluate_local(ts[k], e.idx, e.val);
        bg[g].push_back(e);
      }
      for (const auto& p : post.parents) {
        if (p.prob <= 0.0) continue;
        if (p.parent_node == i) {
          own_pairs[g].push_back({ts[k] - ts[p.parent_index], p.prob});
        } else {
          nbr_pairs[g].push_back(
              {ts[k] - data.times[p.parent_node][p.parent_index], p.prob});
          cross_mass[g][model.membership[p.parent_node]] += p.prob;
        }
      }
    }
  }

  // Cross-exposure pieces: for receiving group g the compensator coefficient
  // of phi_{g g'} is sum over parents j in g' of c_g(j) * residual mass of j,
  // with c_g(j) = sum_{i in g, j in N_i} 1/d_i.
  struct TailEntry {
    double tail;
    double coeff;
    int group;
  };
  std::vector<std::vector<double>> cross_full(G, std::vector<double>(G, 0.0));
  std::vector<std::vector<TailEntry>> cross_tails(G);
  {
    std::vector<double> coeff(m);
    for (int g = 0; g < G; ++g) {
      std::fill(coeff.begin(), coeff.end(), 0.0);
      for (int i = 0; i < m; ++i) {
        if (model.membership[i] != g) continue;
        const int d = net.out_degree(i);
        if (d == 0) continue;
        const double invd = 1.0 / d;
        for (int j : net.out_neighbors(i)) coeff[j] += invd;
      }
      for (int j = 0; j < m; ++j) {
        if (coeff[j] <= 0.0) continue;
        cross_full[g][model.membership[j]] += coeff[j] * cache.full_count[j];
        for (double tail : cache.tails[j])
          cross_tails[g].push_back({tail, coeff[j], model.membership[j]});
      }
    }
  }

  const auto xint = model.basis.integral_over(0.0, data.horizon);
  const double floor = model.weight_floor();

  for (int g = 0; g < G; ++g) {
    if (frozen[g]) continue;

    // baseline weights, multiplicative fixed point
    auto& w = model.weights[g];
    std::vector<double> num(n_kt);
    for (int it = 0; it < 500; ++it) {
      std::fill(num.begin(), num.end(), 0.0);
      for (const auto& e : bg[g]) {
        double lam = 0.0;
        for (int a = 0; a < r; ++a) lam += w[e.idx[a]] * e.val[a];
        for (int a = 0; a < r; ++a) num[e.idx[a]] += e.q * e.val[a] / lam;
      }
      double max_rel = 0.0;
      for (int j = 0; j < n_kt; ++j) {
        const double denom = group_size[g] * xint[j];
        double w_new = std::max(w[j] * num[j] / denom, floor);
        max_rel = std::max(max_rel, std::abs(w_new - w[j]) / (w[j] + 1e-300));
        w[j] = w_new;
      }
      if (max_rel < config.inner_rel_tol) break;
    }

    // momentum parameters: profile out beta, golden-section search on eta
    double own_mass = 0.0;
    for (const auto& p : own_pairs[g]) own_mass += p.second;
    if (own_mass <= kMassTiny) {
      model.beta[g] = 0.0;
    } else {
      auto own_obj = [&](double rate) {
        TriggeringKernel kern(rate, b);
        double s = 0.0;
        for (const auto& p : own_pairs[g])
          s += p.second * std::log(kern.density(p.first));
        double expo = own_full[g];
        for (double tail : own_tails[g]) expo += kern.cumulative(tail);
        return s + own_mass * (std::log(own_mass / expo) - 1.0);
      };
      double eta = golden_max_log(own_obj, config.rate_lower,
                                  config.rate_upper, config.search_tol);
      if (own_obj(model.eta[g]) > own_obj(eta)) eta = model.eta[g];
      model.eta[g] = eta;
      TriggeringKernel kern(eta, b);
      double expo = own_full[g];
      for (double tail : own_tails[g]) expo += kern.cumulative(tail);
      model.beta[g] = own_mass / expo;
    }

    // network parameters: profile out the phi row, search on gamma
    double cross_total = 0.0;
    for (int gp = 0; gp < G; ++gp) cross_total += cross_mass[g][gp];
    if (cross_total <= kMassTiny) {
      std::fill(model.phi[g].begin(), model.phi[g].end(), 0.0);
    } else {
      auto cross_expo = [&](const TriggeringKernel& kern,
                            std::vector<double>& expo) {
        expo = cross_full[g];
        for (const auto& te : cross_tails[g])
          expo[te.group] += te.coeff * kern.cumulative(te.tail);
      };
      std::vector<double> expo(G);
      auto cross_obj = [&](double rate) {
        TriggeringKernel kern(rate, b);
        double s = 0.0;
        for (const auto& p : nbr_pairs[g])
          s += p.second * std::log(kern.density(p.first));
        cross_expo(kern, expo);
        for (int gp = 0; gp < G; ++gp) {
          const double mass = cross_mass[g][gp];
          if (mass > kMassTiny)
            s += mass * (std::log(mass / expo[gp]) - 1.0);
        }
        return s;
      };
      double gamma = golden_max_log(cross_obj, config.rate_lower,
                                    config.rate_upper, config.search_tol);
      if (cross_obj(model.gamma[g]) > cross_obj(gamma))
        gamma = model.gamma[g];
      model.gamma[g] = gamma;
      TriggeringKernel kern(gamma, b);
      cross_expo(kern, expo);
      for (int gp = 0; gp < G; ++gp) {
        const double mass = cross_mass[g][gp];
        model.phi[g][gp] = mass > kMassTiny ? mass / expo[gp] : 0.0;
      }
    }
  }
  return model;
}

}  // namespace

GnhpModel m_step(const Responsibilities& resp, const EventData& data,
                 const Network& net, const GnhpModel& model_in,
                 MStepMode mode, const EmConfig& config,
                 std::vector<int>* frozen_groups) {
  const auto cache = build_cache(net, data, model_in.truncation);
  return m_step_cached(resp, data, net, model_in, mode, config, cache,
                       frozen_groups);
}

namespace {

// Lloyd iterations with farthest-point reseeding of emptied clusters.
std::vector<int> kmeans(const std::vector<std::vector<double>>& feats, int G,
                        int restarts, std::mt19937_64& rng) {
  const int m = static_cast<int>(feats.size());
  const int dim = static_cast<int>(feats[0].size());
  std::vector<int> best_labels(m, 0);
  double best_inertia = kInf;
  std::uniform_int_distribution<int> pick(0, m - 1);
  for (int rep = 0; rep < restarts; ++rep) {
    std::vector<std::vector<double>> centers(G);
    for (int g = 0; g < G; ++g) centers[g] = feats[pick(rng)];
    std::vector<int> labels(m, 0);
    double inertia = 0.0;
    for (int it = 0; it < 100; ++it) {
      inertia = 0.0;
      bool changed = false;
      std::vector<double> farthest(G, -1.0);
      for (int i = 0; i < m; ++i) {
        int arg = 0;
        double bd = kInf;
        for (int g = 0; g < G; ++g) {
          double d2 = 0.0;
          for (int a = 0; a < dim; ++a) {
            const double diff = feats[i][a] - centers[g][a];
            d2 += diff * diff;
          }
          if (d2 < bd) {
            bd = d2;
            arg = g;
          }
        }
        if (labels[i] != arg) changed = true;
        labels[i] = arg;
        inertia += bd;
      }
      std::vector<int> count(G, 0);
      std::vector<std::vector<double>> sums(G,
                                            std::vector<double>(dim, 0.0));
      for (int i = 0; i < m; ++i) {
        ++count[labels[i]];
        for (int a = 0; a < dim; ++a) sums[labels[i]][a] += feats[i][a];
      }
      for (int g = 0; g < G; ++g) {
        if (count[g] == 0) {
          // reseed with the point farthest from its center
          int far = 0;
          double fd = -1.0;
          for (int i = 0; i < m; ++i) {
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) {
              const double diff = feats[i][a] - centers[labels[i]][a];
              d2 += diff * diff;
            }
            if (d2 > fd) {
              fd = d2;
              far = i;
            }
          }
          centers[g] = feats[far];
          changed = true;
        } else {
          for (int a = 0; a < dim; ++a) centers[g][a] = sums[g][a] / count[g];
        }
      }
      if (!changed) break;
      (void)farthest;
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

}  // namespace

namespace {

// activity features: hour-of-period histogram, volume, mean log gap;
// standardized per coordinate. gap_mean (optional) receives the raw mean
// inter-event gap pooled over nodes.
std::vector<std::vector<double>> activity_features(const EventData& data,
                                                   double* gap_mean) {
  const int m = data.num_nodes();
  const double T = data.horizon;
  const double omega = data.period;
  const int bins = 12;
  std::vector<std::vector<double>> feats(m, std::vector<double>(bins + 2, 0.0));
  double gap_sum = 0.0;
  std::size_t gap_n = 0;
  for (int i = 0; i < m; ++i) {
    const auto& ts = data.times[i];
    for (double t : ts) {
      int bnum = static_cast<int>(std::fmod(t, omega) / omega * bins);
      bnum = std::min(std::max(bnum, 0), bins - 1);
      feats[i][bnum] += 1.0;
    }
    if (!ts.empty()) {
      for (int bnum = 0; bnum < bins; ++bnum)
        feats[i][bnum] /= static_cast<double>(ts.size());
    }
    feats[i][bins] = std::log1p(static_cast<double>(ts.size()));
    double g = std::log(T);
    if (ts.size() >= 2) {
      double s = 0.0;
      for (std::size_t k = 1; k < ts.size(); ++k) {
        const double d = std::max(ts[k] - ts[k - 1], 1e-9);
        s += std::log(d);
        gap_sum += d;
        ++gap_n;
      }
      g = s / static_cast<double>(ts.size() - 1);
    }
    feats[i][bins + 1] = g;
  }
  for (int a = 0; a < bins + 2; ++a) {
    double mean = 0.0, sq = 0.0;
    for (int i = 0; i < m; ++i) mean += feats[i][a];
    mean /= m;
    for (int i = 0; i < m; ++i) sq += (feats[i][a] - mean) * (feats[i][a] - mean);
    const double sd = std::sqrt(sq / m);
    for (int i = 0; i < m; ++i)
      feats[i][a] = sd > 1e-12 ? (feats[i][a] - mean) / sd : 0.0;
  }
  if (gap_mean)
    *gap_mean = gap_n > 0 ? gap_sum / static_cast<double>(gap_n) : 1.0;
  return feats;
}

}  // namespace

GnhpModel initialize(const Network& net, const EventData& data,
                     const EmConfig& config, std::mt19937_64& rng) {
  const int m = data.num_nodes();
  const int G = config.num_groups;
  const double T = data.horizon;
  const double omega = data.period;
  const int bins = 12;
  double mean_gap_raw = 1.0;
  const auto feats = activity_features(data, &mean_gap_raw);

  GnhpModel model{PeriodicSplineBasis(config.spline_order, config.num_basis,
                                      omega)};
  model.num_groups = G;
  model.truncation = config.truncation;
  // kmeans_restarts <= 0 requests a uniformly random partition; fit() uses
  // that on alternate starts so the pool is not G copies of the same
  // feature-space clustering.
  if (G == 1) {
    model.membership.assign(m, 0);
  } else if (config.kmeans_restarts <= 0) {
    std::uniform_int_distribution<int> pick(0, G - 1);
    model.membership.resize(m);
    for (int i = 0; i < m; ++i) model.membership[i] = pick(rng);
  } else {
    model.membership = kmeans(feats, G, config.kmeans_restarts, rng);
  }

  const double mean_gap = mean_gap_raw;
  const double rate0 = std::min(std::max(1.0 / mean_gap, config.rate_lower),
                                config.rate_upper);
  model.beta.assign(G, 0.2);
  model.eta.assign(G, rate0);
  model.gamma.assign(G, rate0);
  model.phi.assign(G, std::vector<double>(G, 0.2));

  // per-group piecewise-constant rate over the period, projected onto the
  // spline basis
  model.weights.resize(G);
  std::vector<int> size(G, 0);
  for (int g : model.membership) ++size[g];
  for (int g = 0; g < G; ++g) {
    std::vector<double> counts(bins, 0.0);
    for (int i = 0; i < m; ++i) {
      if (model.membership[i] != g) continue;
      for (double t : data.times[i]) {
        int bnum = static_cast<int>(std::fmod(t, omega) / omega * bins);
        bnum = std::min(std::max(bnum, 0), bins - 1);
        counts[bnum] += 1.0;
      }
    }
    const double exposure = std::max(size[g], 1) * T / bins;
    std::vector<double> grid, vals;
    const int per_bin = 8;
    for (int bnum = 0; bnum < bins; ++bnum) {
      for (int a = 0; a < per_bin; ++a) {
        grid.push_back((bnum + (a + 0.5) / per_bin) * omega / bins);
        vals.push_back(counts[bnum] / exposure);
      }
    }
    model.weights[g] = project_baseline(model.basis, grid, vals);
  }

  // stochastic-EM polish: sample one parent per event and run the
  // complete-data M-step with hard membership updates. The sampling noise
  // walks the labels out of the shallow traps the deterministic EM cannot
  // leave on its own.
  const auto cache = build_cache(net, data, model.truncation);
  const MStepMode mode = config.update_memberships && G > 1
                             ? MStepMode::kHardMembership
                             : MStepMode::kFixedMembership;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < config.stochastic_init_iters; ++it) {
    Responsibilities resp = e_step_cached(model, net, data, cache);
    for (auto& node_events : resp.events) {
      for (auto& post : node_events) {
        double u = unif(rng);
        int chosen = -1;
        double acc = post.background;
        for (std::size_t p = 0; p < post.parents.size() && u >= acc; ++p) {
          acc += post.parents[p].prob;
          if (u < acc) chosen = static_cast<int>(p);
        }
        post.background = chosen < 0 ? 1.0 : 0.0;
        for (std::size_t p = 0; p < post.parents.size(); ++p)
          post.parents[p].prob = static_cast<int>(p) == chosen ? 1.0 : 0.0;
      }
    }
    model = m_step_cached(resp, data, net, model, mode, config, cache,
                          nullptr);
  }
  return model;
}

RefinementResult refine_memberships(const GnhpModel& model, const Network& net,
                                    const EventData& data,
                                    std::optional<double> threshold) {
  const int m = data.num_nodes();
  const int G = model.num_groups;
  RefinementResult out;
  out.membership = model.membership;
  out.phi.resize(m);

  std::vector<double> fitted(m);
  for (int i = 0; i < m; ++i)
    fitted[i] = node_log_likelihood(model, net, data, i);

  double delta;
  if (threshold) {
    delta = *threshold;
  } else {
    double sd_sum = 0.0;
    for (int g = 0; g < G; ++g) {
      std::vector<double> vals;
      for (int i = 0; i < m; ++i)
        if (model.membership[i] == g) vals.push_back(fitted[i]);
      if (vals.size() >= 2) {
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double sq = 0.0;
        for (double v : vals) sq += (v - mean) * (v - mean);
        sd_sum += std::sqrt(sq / static_cast<double>(vals.size() - 1));
      }
    }
    delta = (2.0 / G) * sd_sum;
  }

  const double T = data.horizon;
  const double b = model.truncation;
  const auto xint = model.basis.integral_over(0.0, T);
  const auto keta = group_kernels(model.eta, model.truncation);
  const auto kgam = group_kernels(model.gamma, model.truncation);

  for (int i = 0; i < m; ++i) {
    const auto& nb = net.out_neighbors(i);
    const int d = static_cast<int>(nb.size());
    const double invd = d > 0 ? 1.0 / d : 0.0;
    const auto& ts = data.times[i];
    const int nk = static_cast<int>(ts.size());

    double best_ll = -kInf;
    int best_g = model.membership[i];
    std::vector<double> best_varphi;

    // the profile search set allows each neighbor any entry of the phi row
    // under consideration; coordinate ascent on the decomposition
    //   l_i = sum_k log(c_k + sum_a varphi_a s_{k a}) - comp0
    //         - sum_a varphi_a E_a
    std::vector<double> c(nk), lam(nk), E(d), varphi(d);
    std::vector<std::vector<double>> s(d, std::vector<double>(nk));
    for (int g = 0; g < G; ++g) {
      double comp0 = 0.0;
      for (int j = 0; j < model.basis.num_basis(); ++j)
        comp0 += model.weights[g][j] * xint[j];
      for (int k = 0; k < nk; ++k) {
        const double t = ts[k];
        double v = model.baseline(g, t);
        if (model.beta[g] > 0.0) {
          double own = 0.0;
          for (int l = k - 1; l >= 0 && t - ts[l] < b; --l)
            own += keta[g].density(t - ts[l]);
          v += model.beta[g] * own;
        }
        c[k] = v;
      }
      for (double t : ts) comp0 += model.beta[g] * keta[g].cumulative(T - t);
      for (int a = 0; a < d; ++a) {
        const auto& tj = data.times[nb[a]];
        double e = 0.0;
        for (double t : tj) e += kgam[g].cumulative(T - t);
        E[a] = invd * e;
        for (int k = 0; k < nk; ++k) {
          const double t = ts[k];
          auto lo = std::upper_bound(tj.begin(), tj.end(), t - b);
          auto hi = std::lower_bound(tj.begin(), tj.end(), t);
          double mass = 0.0;
          for (auto it = lo; it != hi; ++it)
            mass += kgam[g].density(t - *it);
          s[a][k] = invd * mass;
        }
      }
      for (int row = 0; row < G; ++row) {
        for (int a = 0; a < d; ++a)
          varphi[a] = model.phi[row][model.membership[nb[a]]];
        for (int k = 0; k < nk; ++k) {
          lam[k] = c[k];
          for (int a = 0; a < d; ++a) lam[k] += varphi[a] * s[a][k];
        }
        double obj = -comp0;
        for (int k = 0; k < nk; ++k) obj += std::log(lam[k]);
        for (int a = 0; a < d; ++a) obj -= varphi[a] * E[a];
        for (int pass = 0; pass < 25; ++pass) {
          bool moved = false;
          for (int a = 0; a < d; ++a) {
            double gain_best = 0.0;
            double v_best = varphi[a];
            for (int gp = 0; gp < G; ++gp) {
              const double v = model.phi[row][gp];
              if (v == varphi[a]) continue;
              const double dv = v - varphi[a];
              double gain = -dv * E[a];
              for (int k = 0; k < nk; ++k) {
                const double nl = lam[k] + dv * s[a][k];
                if (!(nl > 0.0)) {
                  gain = -kInf;
                  break;
                }
                gain += std::log(nl / lam[k]);
              }
              if (gain > gain_best + 1e-12) {
                gain_best = gain;
                v_best = v;
              }
            }
            if (v_best != varphi[a]) {
              const double dv = v_best - varphi[a];
              for (int k = 0; k < nk; ++k) lam[k] += dv * s[a][k];
              obj += gain_best;
              varphi[a] = v_best;
              moved = true;
            }
          }
          if (!moved) break;
        }
        const double ll = obj / T;
        if (ll > best_ll) {
          best_ll = ll;
          best_g = g;
          best_varphi = varphi;
        }
      }
    }
    if (best_g != model.membership[i] && best_ll - fitted[i] > delta) {
      out.membership[i] = best_g;
      out.phi[i] = best_varphi;
      ++out.switches;
    } else {
      out.phi[i].resize(nb.size());
      const int g = model.membership[i];
      for (std::size_t a = 0; a < nb.size(); ++a)
        out.phi[i][a] = model.phi[g][model.membership[nb[a]]];
    }
  }

  TransitionMatrix B(m);
  for (int i = 0; i < m; ++i) {
    const auto& nb = net.out_neighbors(i);
    const double invd = nb.empty() ? 0.0 : 1.0 / static_cast<double>(nb.size());
    std::vector<int> cols;
    std::vector<double> vals;
    cols.reserve(nb.size() + 1);
    vals.reserve(nb.size() + 1);
    bool placed = false;
    const double diag = model.beta[out.membership[i]];
    for (std::size_t a = 0; a < nb.size(); ++a) {
      if (!placed && i < nb[a]) {
        cols.push_back(i);
        vals.push_back(diag);
        placed = true;
      }
      cols.push_back(nb[a]);
      vals.push_back(out.phi[i][a] * invd);
    }
    if (!placed) {
      cols.push_back(i);
      vals.push_back(diag);
    }
    B.set_row(i, std::move(cols), std::move(vals));
  }
  out.transition = std::move(B);
  return out;
}

FitResult fit(const Network& net, const EventData& data,
              const EmConfig& config) {
  if (config.num_groups < 1)
    throw std::invalid_argument("num_groups must be positive");
  const auto cache = build_cache(
      net, data, config.truncation);

  GnhpModel best_model{PeriodicSplineBasis(config.spline_order,
                                           config.num_basis, data.period)};
  std::vector<double> best_trace;
  double best_ll = -kInf;
  bool best_converged = false;
  int best_iters = 0;

  const MStepMode mode = config.update_memberships && config.num_groups > 1
                             ? MStepMode::kHardMembership
                             : MStepMode::kFixedMembership;
  struct EmRun {
    double loglik = -kInf;
    std::vector<double> trace;
    bool converged = false;
    int iters = 0;
  };
  const auto run_em = [&](GnhpModel& model, int fixed_warmup = 0) {
    EmRun run;
    double prev = -kInf;
    // let group parameters adapt to a fresh labeling before hard
    // membership updates are allowed to move nodes again
    for (int it = 0; it < fixed_warmup; ++it) {
      const Responsibilities resp = e_step_cached(model, net, data, cache);
      model = m_step_cached(resp, data, net, model,
                            MStepMode::kFixedMembership, config, cache,
                            nullptr);
    }
    for (int it = 0; it < config.max_iterations; ++it) {
      const Responsibilities resp = e_step_cached(model, net, data, cache);
      model = m_step_cached(resp, data, net, model, mode, config, cache,
                            nullptr);
      const double ll = log_likelihood(model, net, data);
      run.trace.push_back(ll);
      ++run.iters;
      if (std::abs(ll - prev) <= config.loglik_rel_tol * (std::abs(ll) + 1.0)) {
        run.converged = true;
        prev = ll;
        break;
      }
      prev = ll;
    }
    run.loglik = prev;
    return run;
  };

  const int extra = config.warm_start != nullptr ? 1 : 0;
  for (int s = 0; s < config.n_starts + extra; ++s) {
    GnhpModel model = [&] {
      if (s == config.n_starts) return *config.warm_start;
      auto rng = substream(config.seed, 11, static_cast<std::uint64_t>(s));
      return initialize(net, data, config, rng);
    }();
    EmRun run = run_em(model);
    if (run.loglik > best_ll) {
      best_ll = run.loglik;
      best_model = model;
      best_trace = std::move(run.trace);
      best_converged = run.converged;
      best_iters = run.iters;
    }
  }

  // Split move: multi-start EM occasionally converges with one group holding
  // almost no nodes because two true groups merged into one. Bisect the
  // largest group on per-node posterior parent shares (background / self /
  // network) — the axes along which merged groups actually differ — rerun
  // EM, and keep the split solution only if the likelihood improves.
  if (mode == MStepMode::kHardMembership) {
    const int m = data.num_nodes();
    for (int attempt = 0; attempt < config.num_groups; ++attempt) {
      std::vector<int> size(config.num_groups, 0);
      for (int g : best_model.membership) ++size[g];
      int tiny = 0, big = 0;
      for (int g = 0; g < config.num_groups; ++g) {
        if (size[g] < size[tiny]) tiny = g;
        if (size[g] > size[big]) big = g;
      }
      if (size[tiny] * 10 * config.num_groups >= m || size[big] < 4) break;
      std::vector<int> nodes;
      for (int i = 0; i < m; ++i)
        if (best_model.membership[i] == big) nodes.push_back(i);
      const Responsibilities resp =
          e_step_cached(best_model, net, data, cache);
      std::vector<std::vector<double>> sub(nodes.size(),
                                           std::vector<double>(3, 0.0));
      for (std::size_t a = 0; a < nodes.size(); ++a) {
        const int i = nodes[a];
        double bg = 0.0, self = 0.0, nw = 0.0;
        for (const auto& post : resp.events[i]) {
          bg += post.background;
          for (const auto& p : post.parents)
            (p.parent_node == i ? self : nw) += p.prob;
        }
        const double n = std::max<double>(data.times[i].size(), 1.0);
        sub[a] = {bg / n, self / n, nw / n};
      }
      for (int c = 0; c < 3; ++c) {
        double mean = 0.0, sq = 0.0;
        for (const auto& f : sub) mean += f[c];
        mean /= static_cast<double>(sub.size());
        for (const auto& f : sub) sq += (f[c] - mean) * (f[c] - mean);
        const double sd = std::sqrt(sq / static_cast<double>(sub.size()));
        for (auto& f : sub) f[c] = sd > 1e-12 ? (f[c] - mean) / sd : 0.0;
      }
      auto rng = substream(config.seed, 12, static_cast<std::uint64_t>(attempt));
      const std::vector<int> half =
          kmeans(sub, 2, std::max(1, config.kmeans_restarts), rng);
      int ones = 0;
      for (int h : half) ones += h;
      const int move_label =
          2 * ones <= static_cast<int>(nodes.size()) ? 1 : 0;
      GnhpModel model = best_model;
      for (std::size_t a = 0; a < nodes.size(); ++a)
        if (half[a] == move_label) model.membership[nodes[a]] = tiny;
      // the tiny group's parameters were fit to almost no nodes, and phi
      // entries at exactly zero are absorbing under EM: give the group a
      // neutral restart so events can be reattributed
      model.beta[tiny] = 0.2;
      model.eta[tiny] = model.eta[big];
      model.gamma[tiny] = model.gamma[big];
      model.weights[tiny] = model.weights[big];
      for (int g = 0; g < config.num_groups; ++g) {
        model.phi[tiny][g] = 0.2;
        model.phi[g][tiny] = std::max(model.phi[g][tiny], 0.2);
      }
      EmRun run = run_em(model, 10);
      if (run.loglik <= best_ll) break;
      best_ll = run.loglik;
      best_model = model;
      best_trace = std::move(run.trace);
      best_converged = run.converged;
      best_iters += run.iters;
    }
  }

  FitResult result{best_model};
  const std::optional<double> threshold =
      config.refine_threshold < 0.0
          ? std::optional<double>{}
          : std::optional<double>{config.refine_threshold};

  // alternate refinement with a fixed-membership refit until the labels
  // stop moving (at least one refit pass always runs)
  GnhpModel model = best_model;
  RefinementResult refinement;
  double prev = -kInf;
  bool refit_converged = false;
  std::vector<double> trace = std::move(best_trace);
  int iters = best_iters;
  std::vector<int> frozen;
  if (config.refine_rounds <= 0) {
    // No refinement requested: report the plain EM solution.
    refinement.membership = model.membership;
    refinement.phi.resize(data.num_nodes());
    for (int i = 0; i < data.num_nodes(); ++i) {
      const auto& nb = net.out_neighbors(i);
      refinement.phi[i].resize(nb.size());
      for (std::size_t a = 0; a < nb.size(); ++a)
        refinement.phi[i][a] =
            model.phi[model.membership[i]][model.membership[nb[a]]];
    }
    prev = best_ll;
    refit_converged = true;
  }
  const int rounds = std::max(0, config.refine_rounds);
  for (int round = 0; round < rounds; ++round) {
    refinement = refine_memberships(model, net, data, threshold);
    model.membership = refinement.membership;
    prev = -kInf;
    refit_converged = false;
    for (int it = 0; it < config.max_iterations; ++it) {
      const Responsibilities resp = e_step_cached(model, net, data, cache);
      frozen.clear();
      model = m_step_cached(resp, data, net, model,
                            MStepMode::kFixedMembership, config, cache,
                            &frozen);
      const double ll = log_likelihood(model, net, data);
      trace.push_back(ll);
      ++iters;
      if (std::abs(ll - prev) <=
          config.loglik_rel_tol * (std::abs(ll) + 1.0)) {
        refit_converged = true;
        prev = ll;
        break;
      }
      prev = ll;
    }
    if (refinement.switches == 0) break;
  }
  result.refined_membership = refinement.membership;
  result.refined_phi = std::move(refinement.phi);

  // the refined transition uses the refit beta together with the per-node
  // interaction vectors picked during refinement
  {
    const int m = data.num_nodes();
    TransitionMatrix B(m);
    for (int i = 0; i < m; ++i) {
      const auto& nb = net.out_neighbors(i);
      const double invd =
          nb.empty() ? 0.0 : 1.0 / static_cast<double>(nb.size());
      std::vector<int> cols;
      std::vector<double> vals;
      cols.reserve(nb.size() + 1);
      vals.reserve(nb.size() + 1);
      bool placed = false;
      const double diag = model.beta[result.refined_membership[i]];
      for (std::size_t a = 0; a < nb.size(); ++a) {
        if (!placed && i < nb[a]) {
          cols.push_back(i);
          vals.push_back(diag);
          placed = true;
        }
        cols.push_back(nb[a]);
        vals.push_back(result.refined_phi[i][a] * invd);
      }
      if (!placed) {
        cols.push_back(i);
        vals.push_back(diag);
      }
      B.set_row(i, std::move(cols), std::move(vals));
    }
    result.refined_transition = std::move(B);
  }

  result.model = std::move(model);
  result.loglik = prev;
  result.loglik_trace = std::move(trace);
  result.converged = best_converged && refit_converged;
  result.iterations = iters;
  result.frozen_groups = std::move(frozen);
  if (config.compute_covariance) {
    const ScoreResult score =
        score_and_hessian_plugin(result.model, net, data);
    result.covariance =
        alpha_covariance(score, data.num_nodes(), data.horizon);
  }
  return result;
}

CompleteDataLoglik complete_data_loglik(
    const GnhpModel& model, const Network& net, const EventData& data,
    const std::vector<std::vector<std::pair<int, int>>>& parents) {
  const int m = data.num_nodes();
  const double T = data.horizon;
  const auto xint = model.basis.integral_over(0.0, T);
  CompleteDataLoglik out;
  for (int i = 0; i < m; ++i) {
    const int g = model.membership[i];
    const int d = net.out_degree(i);
    const double invd = d > 0 ? 1.0 / d : 0.0;
    const TriggeringKernel keta = model.momentum_kernel(g);
    const TriggeringKernel kgam = model.network_kernel(g);
    for (int j = 0; j < model.basis.num_basis(); ++j)
      out.background -= model.weights[g][j] * xint[j];
    const auto& ts = data.times[i];
    double own_expo = 0.0;
    for (double t : ts) own_expo += keta.cumulative(T - t);
    out.momentum -= model.beta[g] * own_expo;
    for (int j : net.out_neighbors(i)) {
      double expo = 0.0;
      for (double t : data.times[j]) expo += kgam.cumulative(T - t);
      out.network -= model.phi[g][model.membership[j]] * invd * expo;
    }
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto [pn, pk] = parents[i][k];
      if (pn < 0) {
        out.background += std::log(model.baseline(g, ts[k]));
      } else if (pn == i) {
        out.momentum += std::log(model.beta[g]) +
                        std::log(keta.density(ts[k] - ts[pk]));
      } else {
        out.network += std::log(model.phi[g][model.membership[pn]] * invd) +
                       std::log(kgam.density(ts[k] - data.times[pn][pk]));
      }
    }
  }
  return out;
}

}  // namespace gnhp

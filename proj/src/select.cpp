#include "gnhp/select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace gnhp {

double lic_lambda(const EventData& data, const Network& net,
                  double denom_const, bool median_counts) {
  const int m = data.num_nodes();
  if (m == 0 || data.horizon <= 0.0)
    throw std::invalid_argument("lic_lambda needs events over a horizon");
  std::vector<int> counts = data.counts();
  double center;
  if (median_counts) {
    std::sort(counts.begin(), counts.end());
    center = (m % 2 == 1)
                 ? counts[m / 2]
                 : 0.5 * (counts[m / 2 - 1] + counts[m / 2]);
  } else {
    double s = 0.0;
    for (int c : counts) s += c;
    center = s / m;
  }
  double dbar = 0.0;
  for (int i = 0; i < m; ++i) dbar += net.out_degree(i);
  dbar /= m;
  return std::pow(center, 0.6) * std::pow(dbar, 0.25) /
         (denom_const * data.horizon);
}

GnhpModel merge_closest_groups(const GnhpModel& model) {
  const int G = model.num_groups;
  if (G < 2) throw std::invalid_argument("nothing to merge");
  int ga = 0, gb = 1;
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < G; ++a) {
    for (int c = a + 1; c < G; ++c) {
      double d2 = 0.0;
      for (int j = 0; j < model.basis.num_basis(); ++j) {
        const double diff = model.weights[a][j] - model.weights[c][j];
        d2 += diff * diff;
      }
      auto sq = [](double x) { return x * x; };
      d2 += sq(model.beta[a] - model.beta[c]) +
            sq(model.eta[a] - model.eta[c]) +
            sq(model.gamma[a] - model.gamma[c]);
      for (int j = 0; j < G; ++j) d2 += sq(model.phi[a][j] - model.phi[c][j]);
      if (d2 < best) {
        best = d2;
        ga = a;
        gb = c;
      }
    }
  }
  // old label -> new label; gb folds into ga, labels above gb shift down
  std::vector<int> remap(G);
  for (int g = 0, next = 0; g < G; ++g)
    remap[g] = (g == gb) ? -1 : next++;
  remap[gb] = remap[ga];

  GnhpModel out{model.basis};
  out.num_groups = G - 1;
  out.truncation = model.truncation;
  out.membership = model.membership;
  for (int& g : out.membership) g = remap[g];
  out.weights.assign(G - 1, {});
  out.beta.assign(G - 1, 0.0);
  out.eta.assign(G - 1, 0.0);
  out.gamma.assign(G - 1, 0.0);
  out.phi.assign(G - 1, std::vector<double>(G - 1, 0.0));
  std::vector<std::vector<int>> sources(G - 1);
  for (int g = 0; g < G; ++g) sources[remap[g]].push_back(g);
  for (int g = 0; g < G - 1; ++g) {
    const auto& src = sources[g];
    const double inv = 1.0 / static_cast<double>(src.size());
    out.weights[g].assign(model.basis.num_basis(), 0.0);
    for (int s : src) {
      for (int j = 0; j < model.basis.num_basis(); ++j)
        out.weights[g][j] += model.weights[s][j] * inv;
      out.beta[g] += model.beta[s] * inv;
      out.eta[g] += model.eta[s] * inv;
      out.gamma[g] += model.gamma[s] * inv;
      for (int gp = 0; gp < G - 1; ++gp) {
        const auto& cols = sources[gp];
        double v = 0.0;
        for (int c : cols) v += model.phi[s][c];
        out.phi[g][gp] += v * inv / static_cast<double>(cols.size());
      }
    }
  }
  return out;
}

LicResult select_groups(const Network& net, const EventData& data, int g_min,
                        int g_max, const EmConfig& config) {
  if (g_min < 1 || g_min > g_max)
    throw std::invalid_argument("need 1 <= g_min <= g_max");
  LicResult result;
  result.lambda = lic_lambda(data, net);
  const int span = g_max - g_min + 1;
  result.table.resize(span);
  result.fits.resize(span, FitResult{GnhpModel{PeriodicSplineBasis(
                               config.spline_order, config.num_basis,
                               data.period)}});

  GnhpModel warm{PeriodicSplineBasis(config.spline_order, config.num_basis,
                                     data.period)};
  bool have_warm = false;
  for (int G = g_max; G >= g_min; --G) {
    const int slot = G - g_min;
    auto& entry = result.table[slot];
    entry.num_groups = G;
    entry.penalty = result.lambda * G;
    EmConfig cfg = config;
    cfg.num_groups = G;
    cfg.warm_start = have_warm ? &warm : nullptr;
    try {
      result.fits[slot] = fit(net, data, cfg);
      entry.loglik = result.fits[slot].loglik;
      entry.lic = entry.loglik - entry.penalty;
      entry.converged = result.fits[slot].converged;
      if (G > g_min && G >= 2) {
        warm = merge_closest_groups(result.fits[slot].model);
        have_warm = true;
      }
    } catch (const std::exception& e) {
      entry.failed = true;
      entry.error = e.what();
      have_warm = false;
    }
  }

  int best = -1;
  for (int slot = 0; slot < span; ++slot) {
    if (result.table[slot].failed) continue;
    if (best < 0 || result.table[slot].lic > result.table[best].lic)
      best = slot;
  }
  if (best < 0) throw std::runtime_error("all candidate fits failed");
  result.selected = result.table[best].num_groups;
  return result;
}

void LicResult::save_table_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "G,loglik,penalty,lic,converged\n";
  for (const auto& e : table) {
    if (e.failed) {
      out << e.num_groups << ",nan,nan,nan,0\n";
    } else {
      out << e.num_groups << ',' << e.loglik << ',' << e.penalty << ','
          << e.lic << ',' << (e.converged ? 1 : 0) << '\n';
    }
  }
}

}  // namespace gnhp

#include "gnhp/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gnhp {

std::size_t EventData::total_events() const {
  std::size_t n = 0;
  for (const auto& v : times) n += v.size();
  return n;
}

std::vector<int> EventData::counts() const {
  std::vector<int> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    out[i] = static_cast<int>(times[i].size());
  return out;
}

EventData EventData::from_raw(std::vector<std::vector<double>> raw,
                              double horizon, double period) {
  EventData data;
  data.horizon = horizon;
  data.period = period;
  data.times = std::move(raw);
  for (auto& v : data.times) {
    std::sort(v.begin(), v.end());
    for (std::size_t k = 1; k < v.size(); ++k)
      if (v[k] <= v[k - 1]) v[k] = v[k - 1] + 1e-9;
    if (!v.empty() && (v.front() < 0.0 || v.back() > horizon))
      throw std::invalid_argument("EventData: event time outside [0, T]");
  }
  return data;
}

double GnhpModel::baseline(int g, double t) const {
  int idx[32];
  double val[32];
  basis.evaluate_local(t, idx, val);
  double s = 0.0;
  for (int i = 0; i < basis.order(); ++i) s += weights[g][idx[i]] * val[i];
  return s;
}

TriggeringKernel GnhpModel::momentum_kernel(int g) const {
  return TriggeringKernel(eta[g], truncation);
}

TriggeringKernel GnhpModel::network_kernel(int g) const {
  return TriggeringKernel(gamma[g], truncation);
}

void GnhpModel::validate(int expected_nodes) const {
  const int G = num_groups;
  if (G < 1) throw std::invalid_argument("model: need at least one group");
  if (static_cast<int>(weights.size()) != G ||
      static_cast<int>(beta.size()) != G ||
      static_cast<int>(eta.size()) != G ||
      static_cast<int>(gamma.size()) != G ||
      static_cast<int>(phi.size()) != G)
    throw std::invalid_argument("model: per-group parameter size mismatch");
  const double floor = weight_floor();
  for (int g = 0; g < G; ++g) {
    if (static_cast<int>(weights[g].size()) != basis.num_basis())
      throw std::invalid_argument("model: weight vector size mismatch");
    for (double w : weights[g])
      if (!(w >= floor * (1.0 - 1e-12)))
        throw std::invalid_argument("model: weight below floor");
    if (beta[g] < 0.0) throw std::invalid_argument("model: beta < 0");
    if (!(eta[g] > 0.0) || eta[g] > kRateCap)
      throw std::invalid_argument("model: eta outside (0, cap]");
    if (!(gamma[g] > 0.0) || gamma[g] > kRateCap)
      throw std::invalid_argument("model: gamma outside (0, cap]");
    if (static_cast<int>(phi[g].size()) != G)
      throw std::invalid_argument("model: phi row size mismatch");
    for (double p : phi[g])
      if (p < 0.0) throw std::invalid_argument("model: phi < 0");
  }
  if (expected_nodes >= 0 &&
      static_cast<int>(membership.size()) != expected_nodes)
    throw std::invalid_argument("model: membership length mismatch");
  for (int g : membership)
    if (g < 0 || g >= G)
      throw std::invalid_argument("model: membership label out of range");
  if (!(truncation > 0.0))
    throw std::invalid_argument("model: truncation must be positive");
}

TransitionMatrix build_transition(const Network& net, const GnhpModel& model) {
  model.validate(net.size());
  TransitionMatrix B(net.size());
  for (int i = 0; i < net.size(); ++i) {
    const int gi = model.membership[i];
    std::vector<int> cols;
    std::vector<double> vals;
    const auto& nbrs = net.out_neighbors(i);
    const double inv_d = nbrs.empty() ? 0.0 : 1.0 / nbrs.size();
    cols.reserve(nbrs.size() + 1);
    vals.reserve(nbrs.size() + 1);
    bool diag_done = false;
    for (int j : nbrs) {
      if (!diag_done && j > i) {
        cols.push_back(i);
        vals.push_back(model.beta[gi]);
        diag_done = true;
      }
      cols.push_back(j);
      vals.push_back(model.phi[gi][model.membership[j]] * inv_d);
    }
    if (!diag_done) {
      cols.push_back(i);
      vals.push_back(model.beta[gi]);
    }
    B.set_row(i, std::move(cols), std::move(vals));
  }
  return B;
}

namespace {

// Index of the first event of `v` inside (t - b, t).
std::size_t window_begin(const std::vector<double>& v, double t, double b) {
  return std::lower_bound(v.begin(), v.end(), t - b) - v.begin();
}

std::size_t window_end(const std::vector<double>& v, double t) {
  return std::lower_bound(v.begin(), v.end(), t) - v.begin();
}

}  // namespace

double intensity(const GnhpModel& model, const Network& net,
                 const EventData& data, int node, double t) {
  if (node < 0 || node >= data.num_nodes())
    throw std::invalid_argument("intensity: node index out of range");
  const int g = model.membership[node];
  double lam = model.baseline(g, t);

  const double b = model.truncation;
  const auto& own = data.times[node];
  if (model.beta[g] > 0.0) {
    const TriggeringKernel mk = model.momentum_kernel(g);
    double s = 0.0;
    for (std::size_t k = window_begin(own, t, b); k < window_end(own, t); ++k)
      s += mk.density(t - own[k]);
    lam += model.beta[g] * s;
  }
  const auto& nbrs = net.out_neighbors(node);
  if (!nbrs.empty()) {
    const TriggeringKernel nk = model.network_kernel(g);
    const double inv_d = 1.0 / nbrs.size();
    double s = 0.0;
    for (int j : nbrs) {
      const double ph = model.phi[g][model.membership[j]];
      if (ph == 0.0) continue;
      const auto& tj = data.times[j];
      double sj = 0.0;
      for (std::size_t l = window_begin(tj, t, b); l < window_end(tj, t); ++l)
        sj += nk.density(t - tj[l]);
      s += ph * sj;
    }
    lam += inv_d * s;
  }
  return lam;
}

double node_log_likelihood(const GnhpModel& model, const Network& net,
                           const EventData& data, int node, int group,
                           const std::vector<double>& varphi) {
  const int g = group;
  const double T = data.horizon;
  const double b = model.truncation;
  const auto& own = data.times[node];
  const auto& nbrs = net.out_neighbors(node);
  if (varphi.size() != nbrs.size())
    throw std::invalid_argument("node_log_likelihood: varphi size mismatch");
  const double inv_d = nbrs.empty() ? 0.0 : 1.0 / nbrs.size();
  const TriggeringKernel mk = model.momentum_kernel(g);
  const TriggeringKernel nk = model.network_kernel(g);

  double log_sum = 0.0;
  for (std::size_t k = 0; k < own.size(); ++k) {
    const double t = own[k];
    double lam = model.baseline(g, t);
    if (model.beta[g] > 0.0) {
      double s = 0.0;
      for (std::size_t l = window_begin(own, t, b); l < k; ++l)
        s += mk.density(t - own[l]);
      lam += model.beta[g] * s;
    }
    for (std::size_t jn = 0; jn < nbrs.size(); ++jn) {
      if (varphi[jn] == 0.0) continue;
      const auto& tj = data.times[nbrs[jn]];
      double sj = 0.0;
      for (std::size_t l = window_begin(tj, t, b); l < window_end(tj, t); ++l)
        sj += nk.density(t - tj[l]);
      lam += inv_d * varphi[jn] * sj;
    }
    if (!(lam > 0.0))
      throw std::domain_error("log_likelihood: zero intensity at an event");
    log_sum += std::log(lam);
  }

  // Compensator: exact baseline integral plus kernel tail masses.
  const std::vector<double> xint = model.basis.integral_over(0.0, T);
  double comp = 0.0;
  for (int j = 0; j < model.basis.num_basis(); ++j)
    comp += model.weights[g][j] * xint[j];
  if (model.beta[g] > 0.0) {
    double s = 0.0;
    for (double t : own) s += mk.cumulative(T - t);
    comp += model.beta[g] * s;
  }
  for (std::size_t jn = 0; jn < nbrs.size(); ++jn) {
    if (varphi[jn] == 0.0) continue;
    double s = 0.0;
    for (double t : data.times[nbrs[jn]]) s += nk.cumulative(T - t);
    comp += inv_d * varphi[jn] * s;
  }
  return (log_sum - comp) / T;
}

double node_log_likelihood(const GnhpModel& model, const Network& net,
                           const EventData& data, int node) {
  const int g = model.membership[node];
  const auto& nbrs = net.out_neighbors(node);
  std::vector<double> varphi(nbrs.size());
  for (std::size_t k = 0; k < nbrs.size(); ++k)
    varphi[k] = model.phi[g][model.membership[nbrs[k]]];
  return node_log_likelihood(model, net, data, node, g, varphi);
}

double log_likelihood(const GnhpModel& model, const Network& net,
                      const EventData& data) {
  model.validate(data.num_nodes());
  double s = 0.0;
  for (int i = 0; i < data.num_nodes(); ++i)
    s += node_log_likelihood(model, net, data, i);
  return s / data.num_nodes();
}

ScoreResult score_and_hessian_plugin(const GnhpModel& model,
                                     const Network& net,
                                     const EventData& data) {
  model.validate(data.num_nodes());
  const int G = model.num_groups;
  const int n_kt = model.basis.num_basis();
  const int wdim = G * n_kt;
  const int dim = wdim + 3 * G + G * G;
  const int m = data.num_nodes();
  const double T = data.horizon;
  const double b = model.truncation;

  ScoreResult res;
  res.weight_dim = wdim;
  res.gradient = Eigen::VectorXd::Zero(dim);
  res.information = Eigen::MatrixXd::Zero(dim, dim);

  auto beta_idx = [&](int g) { return wdim + 3 * g; };
  auto eta_idx = [&](int g) { return wdim + 3 * g + 1; };
  auto gamma_idx = [&](int g) { return wdim + 3 * g + 2; };
  auto phi_idx = [&](int g, int gp) { return wdim + 3 * G + g * G + gp; };

  const std::vector<double> xint = model.basis.integral_over(0.0, T);
  const int order = model.basis.order();

  // Sparse event-level gradient of lambda.
  std::vector<int> nz_idx(dim);
  std::vector<double> nz_val(dim);
  std::vector<double> phi_mass(G);

  for (int i = 0; i < m; ++i) {
    const int g = model.membership[i];
    const auto& own = data.times[i];
    const auto& nbrs = net.out_neighbors(i);
    const double inv_d = nbrs.empty() ? 0.0 : 1.0 / nbrs.size();
    const TriggeringKernel mk = model.momentum_kernel(g);
    const TriggeringKernel nk = model.network_kernel(g);

    // Compensator gradient for this node.
    for (int j = 0; j < n_kt; ++j)
      res.gradient[g * n_kt + j] -= xint[j];
    {
      double fmass = 0.0, fmass_d = 0.0;
      for (double t : own) {
        fmass += mk.cumulative(T - t);
        fmass_d += mk.cumulative_drate(T - t);
      }
      res.gradient[beta_idx(g)] -= fmass;
      res.gradient[eta_idx(g)] -= model.beta[g] * fmass_d;
    }
    for (int j : nbrs) {
      const int gj = model.membership[j];
      double fmass = 0.0, fmass_d = 0.0;
      for (double t : data.times[j]) {
        fmass += nk.cumulative(T - t);
        fmass_d += nk.cumulative_drate(T - t);
      }
      res.gradient[phi_idx(g, gj)] -= inv_d * fmass;
      res.gradient[gamma_idx(g)] -= inv_d * model.phi[g][gj] * fmass_d;
    }

    // Event terms.
    int sp_idx[32];
    double sp_val[32];
    for (std::size_t k = 0; k < own.size(); ++k) {
      const double t = own[k];
      int nnz = 0;
      double lam = 0.0;

      model.basis.evaluate_local(t, sp_idx, sp_val);
      for (int q = 0; q < order; ++q) {
        nz_idx[nnz] = g * n_kt + sp_idx[q];
        nz_val[nnz] = sp_val[q];
        lam += model.weights[g][sp_idx[q]] * sp_val[q];
        ++nnz;
      }

      double own_f = 0.0, own_fd = 0.0;
      for (std::size_t l = window_begin(own, t, b); l < k; ++l) {
        own_f += mk.density(t - own[l]);
        own_fd += mk.density_drate(t - own[l]);
      }
      lam += model.beta[g] * own_f;
      nz_idx[nnz] = beta_idx(g);
      nz_val[nnz++] = own_f;
      nz_idx[nnz] = eta_idx(g);
      nz_val[nnz++] = model.beta[g] * own_fd;

      double net_fd = 0.0;
      std::fill(phi_mass.begin(), phi_mass.end(), 0.0);
      for (int j : nbrs) {
        const int gj = model.membership[j];
        const auto& tj = data.times[j];
        double fj = 0.0, fjd = 0.0;
        for (std::size_t l = window_begin(tj, t, b); l < window_end(tj, t);
             ++l) {
          fj += nk.density(t - tj[l]);
          fjd += nk.density_drate(t - tj[l]);
        }
        phi_mass[gj] += fj;
        net_fd += model.phi[g][gj] * fjd;
      }
      nz_idx[nnz] = gamma_idx(g);
      nz_val[nnz++] = inv_d * net_fd;
      for (int gp = 0; gp < G; ++gp) {
        lam += model.phi[g][gp] * inv_d * phi_mass[gp];
        if (phi_mass[gp] != 0.0) {
          nz_idx[nnz] = phi_idx(g, gp);
          nz_val[nnz++] = inv_d * phi_mass[gp];
        }
      }

      if (!(lam > 0.0))
        throw std::domain_error("score: zero intensity at an event");
      const double inv_lam = 1.0 / lam;
      for (int a = 0; a < nnz; ++a)
        res.gradient[nz_idx[a]] += nz_val[a] * inv_lam;
      const double inv_lam2 = inv_lam * inv_lam;
      for (int a = 0; a < nnz; ++a)
        for (int c = 0; c < nnz; ++c)
          res.information(nz_idx[a], nz_idx[c]) +=
              nz_val[a] * nz_val[c] * inv_lam2;
    }
  }

  res.gradient /= m * T;
  res.information /= m * T;
  return res;
}

CovarianceResult alpha_covariance(const ScoreResult& score, int m, double T) {
  CovarianceResult out;
  const int dim = static_cast<int>(score.information.rows());
  const int adim = dim - score.weight_dim;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      score.information, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(dim - 1);
  out.h_condition = (smin > 0.0) ? smax / smin
                                 : std::numeric_limits<double>::infinity();
  if (!(smin > smax * 1e-14)) {
    out.singular = true;
    out.covariance = Eigen::MatrixXd::Zero(adim, adim);
    out.std_errors.assign(adim, std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  const Eigen::MatrixXd hinv = svd.solve(Eigen::MatrixXd::Identity(dim, dim));
  out.covariance = hinv.bottomRightCorner(adim, adim);
  out.std_errors.resize(adim);
  for (int a = 0; a < adim; ++a) {
    const double v = out.covariance(a, a) / (m * T);
    out.std_errors[a] = v > 0.0 ? std::sqrt(v)
                                : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::string GnhpModel::to_json() const {
  nlohmann::json j;
  j["num_groups"] = num_groups;
  j["period"] = basis.period();
  j["truncation"] = truncation;
  j["basis"] = {{"order", basis.order()}, {"num_basis", basis.num_basis()}};
  j["weights"] = weights;
  j["beta"] = beta;
  j["eta"] = eta;
  j["gamma"] = gamma;
  j["phi"] = phi;
  j["membership"] = membership;
  return j.dump(2);
}

GnhpModel GnhpModel::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  GnhpModel model{PeriodicSplineBasis(j["basis"]["order"].get<int>(),
                                      j["basis"]["num_basis"].get<int>(),
                                      j["period"].get<double>())};
  model.num_groups = j["num_groups"].get<int>();
  model.truncation = j["truncation"].get<double>();
  model.weights = j["weights"].get<std::vector<std::vector<double>>>();
  model.beta = j["beta"].get<std::vector<double>>();
  model.eta = j["eta"].get<std::vector<double>>();
  model.gamma = j["gamma"].get<std::vector<double>>();
  model.phi = j["phi"].get<std::vector<std::vector<double>>>();
  model.membership = j["membership"].get<std::vector<int>>();
  model.validate();
  return model;
}

void GnhpModel::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << to_json() << '\n';
}

GnhpModel GnhpModel::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace gnhp

#include "gnhp/splines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gnhp {

namespace {

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 + x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

PeriodicSplineBasis::PeriodicSplineBasis(int order, int num_basis,
                                         double period)
    : order_(order), n_(num_basis), omega_(period) {
  if (order < 1) throw std::invalid_argument("spline order must be >= 1");
  if (num_basis < order)
    throw std::invalid_argument("num_basis must be >= order");
  if (!(period > 0.0))
    throw std::invalid_argument("period must be positive");
  h_ = omega_ / n_;
  scale_ = std::sqrt(static_cast<double>(n_));
  gauss_legendre((order_ + 2) / 2, gauss_nodes_, gauss_weights_);
}

void PeriodicSplineBasis::raw_local(double u, int* indices,
                                    double* values) const {
  const int p = order_ - 1;
  int span = static_cast<int>(std::floor(u / h_));
  span = std::clamp(span, 0, n_ - 1);  // guard u == omega round-off
  // Cox-de Boor on the uniform knot line U_j = j*h.
  double left[32], right[32];
  values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - (span + 1 - j) * h_;
    right[j] = (span + j) * h_ - u;
    double saved = 0.0;
    for (int k = 0; k < j; ++k) {
      const double temp = values[k] / (right[k + 1] + left[j - k]);
      values[k] = saved + right[k + 1] * temp;
      saved = left[j - k] * temp;
    }
    values[j] = saved;
  }
  for (int i = 0; i <= p; ++i) {
    const int raw = span - p + i;
    indices[i] = ((raw % n_) + n_) % n_;
  }
}

void PeriodicSplineBasis::evaluate_local(double t, int* indices,
                                         double* values) const {
  double u = std::fmod(t, omega_);
  if (u < 0.0) u += omega_;
  raw_local(u, indices, values);
  for (int i = 0; i < order_; ++i) values[i] *= scale_;
}

std::vector<double> PeriodicSplineBasis::evaluate(double t) const {
  std::vector<double> out(n_, 0.0);
  int idx[32];
  double val[32];
  evaluate_local(t, idx, val);
  for (int i = 0; i < order_; ++i) out[idx[i]] += val[i];
  return out;
}

std::vector<double> PeriodicSplineBasis::integral_over(double t0,
                                                       double t1) const {
  if (t0 < 0.0 || t1 < t0)
    throw std::invalid_argument("integral_over: need 0 <= t0 <= t1");
  std::vector<double> out(n_, 0.0);

  // I(0, t) accumulated with sign.
  auto accumulate_prefix = [&](double t, double sign) {
    const double periods = std::floor(t / omega_);
    // Each wrapped raw basis integrates to h over one period (translates of
    // a common partition of unity), so a full period adds scale*h to all.
    const double full = sign * periods * h_ * scale_;
    for (int j = 0; j < n_; ++j) out[j] += full;
    const double u = t - periods * omega_;
    if (u <= 0.0) return;
    const int last_span = std::min(static_cast<int>(std::floor(u / h_)),
                                   n_ - 1);
    int idx[32];
    double val[32];
    for (int s = 0; s <= last_span; ++s) {
      const double a = s * h_;
      const double b = std::min((s + 1) * h_, u);
      if (b <= a) continue;
      const double len = b - a;
      for (std::size_t q = 0; q < gauss_nodes_.size(); ++q) {
        const double x = a + gauss_nodes_[q] * len;
        raw_local(x, idx, val);
        const double w = sign * gauss_weights_[q] * len * scale_;
        for (int i = 0; i < order_; ++i) out[idx[i]] += w * val[i];
      }
    }
  };

  accumulate_prefix(t1, 1.0);
  accumulate_prefix(t0, -1.0);
  return out;
}

double PeriodicSplineBasis::sup_intensity(
    const std::vector<double>& weights) const {
  if (static_cast<int>(weights.size()) != n_)
    throw std::invalid_argument("sup_intensity: weight size mismatch");
  double mx = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("sup_intensity: negative weight");
    mx = std::max(mx, w);
  }
  return scale_ * mx;
}

}  // namespace gnhp

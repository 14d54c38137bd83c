#include "gnhp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gnhp {

namespace {
constexpr double kUniformSwitch = 1e-6;  // rate*b below this: uniform limit

// (1 - exp(-x)) / x with a 3-term expansion for tiny x.
double expm1_ratio(double x) {
  if (std::abs(x) < kUniformSwitch) return 1.0 - x / 2.0 + x * x / 6.0;
  return -std::expm1(-x) / x;
}
}  // namespace

TriggeringKernel::TriggeringKernel(double rate, double truncation)
    : rate_(rate), trunc_(truncation) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("TriggeringKernel: rate must be positive");
  if (!(truncation > 0.0) || !std::isfinite(truncation))
    throw std::invalid_argument("TriggeringKernel: truncation must be positive");
  norm_ = -std::expm1(-rate_ * trunc_);
}

bool TriggeringKernel::uniform_limit() const {
  return rate_ * trunc_ < kUniformSwitch;
}

double TriggeringKernel::density(double t) const {
  if (!std::isfinite(t)) throw std::invalid_argument("density: non-finite t");
  if (t < 0.0 || t > trunc_) return 0.0;
  if (uniform_limit()) return 1.0 / trunc_;
  return rate_ * std::exp(-rate_ * t) / norm_;
}

double TriggeringKernel::density_drate(double t) const {
  if (!std::isfinite(t)) throw std::invalid_argument("density_drate: non-finite t");
  if (t < 0.0 || t > trunc_) return 0.0;
  if (uniform_limit()) {
    // Expansion of d/dg [g e^{-gt} / (1-e^{-gb})] around g = 0.
    return (trunc_ / 2.0 - t) / trunc_;
  }
  const double e = std::exp(-rate_ * t);
  const double deb = trunc_ * std::exp(-rate_ * trunc_);  // d norm / d rate
  return e * (1.0 - rate_ * t) / norm_ - rate_ * e * deb / (norm_ * norm_);
}

double TriggeringKernel::cumulative(double s) const {
  if (s <= 0.0) return 0.0;
  const double u = std::min(s, trunc_);
  if (uniform_limit()) return u / trunc_;
  return -std::expm1(-rate_ * u) / norm_;
}

double TriggeringKernel::cumulative_drate(double s) const {
  if (s <= 0.0) return 0.0;
  const double u = std::min(s, trunc_);
  if (u >= trunc_) return 0.0;
  if (uniform_limit()) {
    // d/dg [ (1-e^{-gu})/(1-e^{-gb}) ] at g -> 0 equals u(b-u)/(2b).
    return u * (trunc_ - u) / (2.0 * trunc_);
  }
  const double num = -std::expm1(-rate_ * u);
  const double dnum = u * std::exp(-rate_ * u);
  const double dden = trunc_ * std::exp(-rate_ * trunc_);
  return (dnum * norm_ - num * dden) / (norm_ * norm_);
}

double TriggeringKernel::inverse_cdf(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return trunc_;
  if (uniform_limit()) return u * trunc_;
  // u = (1 - e^{-g t}) / norm  =>  t = -log(1 - u*norm)/g
  return -std::log1p(-u * norm_) / rate_;
}

std::vector<double> TriggeringKernel::sample_offspring_times(
    double expected_count, double horizon, std::mt19937_64& rng) const {
  std::vector<double> out;
  if (expected_count <= 0.0 || horizon <= 0.0) return out;
  const double mass = cumulative(horizon);
  if (mass <= 0.0) return out;
  std::poisson_distribution<int> pois(expected_count * mass);
  const int n = pois(rng);
  if (n <= 0) return out;
  out.reserve(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < n; ++k) out.push_back(inverse_cdf(mass * unif(rng)));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gnhp

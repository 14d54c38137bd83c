#pragma once

#include <random>
#include <vector>

namespace gnhp {

// Normalized triggering kernel truncated at lag b:
//   f_b(t; rate) = rate * exp(-rate*t) / (1 - exp(-rate*b)),  0 <= t <= b,
// and 0 elsewhere. Integrates to exactly 1 over [0, b]. For rate*b below
// 1e-6 the normalized kernel degenerates to the uniform density 1/b and a
// short Taylor expansion replaces the (1 - e^{-x}) ratios to avoid
// cancellation.
class TriggeringKernel {
 public:
  TriggeringKernel(double rate, double truncation);

  double rate() const { return rate_; }
  double truncation() const { return trunc_; }

  // f_b(t; rate); rejects non-finite t.
  double density(double t) const;

  // d f_b(t; rate) / d rate at fixed t.
  double density_drate(double t) const;

  // F(s) = integral of the density over [0, min(s, b)], in [0, 1].
  double cumulative(double s) const;

  // d F(s) / d rate.
  double cumulative_drate(double s) const;

  // Inverse of cumulative(): smallest t with cumulative(t) = u, u in [0,1].
  double inverse_cdf(double u) const;

  // Draws N ~ Poisson(expected_count * cumulative(horizon)) offspring lags,
  // each i.i.d. from the kernel restricted to [0, min(horizon, b)], sorted.
  // expected_count is the branching multiplier in front of the kernel.
  std::vector<double> sample_offspring_times(double expected_count,
                                             double horizon,
                                             std::mt19937_64& rng) const;

 private:
  bool uniform_limit() const;

  double rate_;
  double trunc_;
  double norm_;  // 1 - exp(-rate*b), cached
};

}  // namespace gnhp

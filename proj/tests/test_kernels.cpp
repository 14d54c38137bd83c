#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gnhp/kernels.hpp"
#include "gnhp/rng.hpp"

using gnhp::TriggeringKernel;

namespace {

// Composite Simpson over [a, b].
template <typename F>
double simpson(F f, double a, double b, int n = 4000) {
  double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("kernel density integrates to one and matches its cdf") {
  for (double rate : {1e-9, 1e-4, 0.1, 0.5, 1.0, 2.0, 50.0}) {
    TriggeringKernel k(rate, 5.0);
    CHECK(simpson([&](double t) { return k.density(t); }, 0.0, 5.0, 40000) ==
          doctest::Approx(1.0).epsilon(1e-7));
    CHECK(k.cumulative(5.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.cumulative(1e9) == doctest::Approx(1.0));
    for (double s : {0.3, 1.7, 4.2}) {
      double quad =
          simpson([&](double t) { return k.density(t); }, 0.0, s, 40000);
      CHECK(k.cumulative(s) == doctest::Approx(quad).epsilon(1e-7));
    }
  }
}

TEST_CASE("kernel vanishes outside the truncation window") {
  TriggeringKernel k(1.3, 5.0);
  CHECK(k.density(-0.1) == 0.0);
  CHECK(k.density(5.0 + 1e-9) == 0.0);
  CHECK(k.density(100.0) == 0.0);
  CHECK(k.cumulative(0.0) == 0.0);
  CHECK_THROWS(k.density(std::nan("")));
}

TEST_CASE("tiny rate degenerates to the uniform density") {
  TriggeringKernel k(1e-9, 5.0);
  for (double t : {0.0, 1.0, 2.5, 4.9})
    CHECK(k.density(t) == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(k.cumulative(2.5) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("rate derivatives match central finite differences") {
  const double h = 1e-6;
  for (double rate : {0.3, 1.0, 3.0}) {
    TriggeringKernel lo(rate - h, 5.0), hi(rate + h, 5.0), k(rate, 5.0);
    for (double t : {0.2, 1.1, 3.3, 4.8}) {
      double fd = (hi.density(t) - lo.density(t)) / (2 * h);
      CHECK(k.density_drate(t) == doctest::Approx(fd).epsilon(1e-5));
      double fdc = (hi.cumulative(t) - lo.cumulative(t)) / (2 * h);
      CHECK(k.cumulative_drate(t) == doctest::Approx(fdc).epsilon(1e-5));
    }
  }
}

TEST_CASE("inverse cdf inverts the cdf") {
  TriggeringKernel k(0.8, 5.0);
  for (double u : {0.01, 0.25, 0.5, 0.9, 0.999})
    CHECK(k.cumulative(k.inverse_cdf(u)) == doctest::Approx(u).epsilon(1e-9));
}

TEST_CASE("offspring sampler hits the censored expectation") {
  TriggeringKernel k(1.0, 5.0);
  auto rng = gnhp::substream(42, 0);
  const double mult = 0.7, horizon = 2.0;
  const int reps = 20000;
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    auto lags = k.sample_offspring_times(mult, horizon, rng);
    total += static_cast<double>(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
      CHECK(lags[i] >= 0.0);
      CHECK(lags[i] <= horizon);
      if (i) CHECK(lags[i] >= lags[i - 1]);
    }
  }
  const double want = mult * k.cumulative(horizon);
  const double se = std::sqrt(want / reps);
  CHECK(std::abs(total / reps - want) < 4 * se);
}

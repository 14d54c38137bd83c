#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gnhp/presets.hpp"
#include "gnhp/splines.hpp"

using gnhp::PeriodicSplineBasis;

namespace {

template <typename F>
double simpson(F f, double a, double b, int n = 4000) {
  double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("scaled partition of unity and periodicity") {
  for (int order : {1, 2, 4}) {
    PeriodicSplineBasis basis(order, 12, 12.0);
    for (double t : {0.0, 0.37, 3.0, 11.999, 25.2, -1.0 + 24.0}) {
      auto x = basis.evaluate(t);
      double sum = std::accumulate(x.begin(), x.end(), 0.0);
      CHECK(sum == doctest::Approx(basis.scale()).epsilon(1e-10));
      auto xp = basis.evaluate(t + 12.0);
      for (int j = 0; j < 12; ++j)
        CHECK(x[j] == doctest::Approx(xp[j]).epsilon(1e-10));
    }
  }
}

TEST_CASE("sparse evaluation agrees with the dense one") {
  PeriodicSplineBasis basis(4, 10, 12.0);
  std::vector<int> idx(4);
  std::vector<double> val(4);
  for (double t : {0.1, 5.9, 11.7}) {
    auto dense = basis.evaluate(t);
    basis.evaluate_local(t, idx.data(), val.data());
    std::vector<double> recon(10, 0.0);
    for (int k = 0; k < 4; ++k) recon[idx[k]] += val[k];
    for (int j = 0; j < 10; ++j)
      CHECK(recon[j] == doctest::Approx(dense[j]).epsilon(1e-12));
  }
}

TEST_CASE("componentwise integrals match quadrature") {
  PeriodicSplineBasis basis(4, 8, 12.0);
  for (auto [a, b] : std::vector<std::pair<double, double>>{
           {0.0, 12.0}, {1.3, 4.7}, {2.0, 30.5}, {11.0, 13.0}}) {
    auto exact = basis.integral_over(a, b);
    for (int j = 0; j < 8; ++j) {
      double quad = simpson(
          [&](double t) { return basis.evaluate(t)[j]; }, a, b, 6000);
      CHECK(exact[j] == doctest::Approx(quad).epsilon(1e-7));
    }
  }
}

TEST_CASE("sup bound dominates the curve") {
  PeriodicSplineBasis basis(4, 9, 12.0);
  std::vector<double> w = {0.1, 0.5, 0.2, 0.9, 0.3, 0.05, 0.4, 0.6, 0.2};
  double cap = basis.sup_intensity(w);
  for (double t = 0.0; t < 12.0; t += 0.01) {
    auto x = basis.evaluate(t);
    double v = 0.0;
    for (int j = 0; j < 9; ++j) v += w[j] * x[j];
    CHECK(v <= cap + 1e-12);
  }
}

TEST_CASE("projection reproduces a smooth periodic curve") {
  PeriodicSplineBasis basis(4, 24, 12.0);
  auto target = [](double t) {
    return 0.5 + 0.3 * std::sin(2 * M_PI * t / 12.0) +
           0.1 * std::cos(4 * M_PI * t / 12.0);
  };
  std::vector<double> grid, vals;
  for (int q = 0; q < 600; ++q) {
    grid.push_back(12.0 * q / 600.0);
    vals.push_back(target(grid.back()));
  }
  auto w = gnhp::project_baseline(basis, grid, vals);
  double worst = 0.0;
  for (double t = 0.0; t < 12.0; t += 0.005) {
    auto x = basis.evaluate(t);
    double v = 0.0;
    for (int j = 0; j < 24; ++j) v += w[j] * x[j];
    worst = std::max(worst, std::abs(v - target(t)));
  }
  CHECK(worst < 1e-3);
}

#pragma once

#include <vector>

namespace gnhp {

// Periodic B-spline basis on [0, omega] with uniform knots and wrap-around.
// The evaluated vector is x(t) = sqrt(n) * (k_1(t mod omega), ..., k_n(t mod
// omega)) where the raw k_j form a partition of unity, each supported on at
// most `order` consecutive knot spans. A baseline intensity is w^T x(t).
class PeriodicSplineBasis {
 public:
  // order r >= 1 (r = 1 gives step functions, r = 4 cubic splines),
  // num_basis >= order, period omega > 0.
  PeriodicSplineBasis(int order, int num_basis, double period);

  int order() const { return order_; }
  int num_basis() const { return n_; }
  double period() const { return omega_; }
  double scale() const { return scale_; }  // sqrt(num_basis)

  // x(t); at most `order` nonzero entries.
  std::vector<double> evaluate(double t) const;

  // Sparse evaluation: writes the `order` active values into values[] and
  // their basis indices into indices[]. Both must hold order() entries.
  void evaluate_local(double t, int* indices, double* values) const;

  // Componentwise integral of x over [t0, t1], 0 <= t0 <= t1; exact for the
  // piecewise-polynomial basis (full periods plus Gauss-Legendre on partial
  // knot spans).
  std::vector<double> integral_over(double t0, double t1) const;

  // Upper bound on w^T x(t) over t: sqrt(n) * max_j w_j (weights >= 0).
  double sup_intensity(const std::vector<double>& weights) const;

 private:
  // Raw (unscaled) basis values at u in [0, omega); fills values[0..order-1]
  // for wrapped indices indices[0..order-1].
  void raw_local(double u, int* indices, double* values) const;

  int order_;
  int n_;
  double omega_;
  double h_;      // knot spacing omega / n
  double scale_;  // sqrt(n)
  std::vector<double> gauss_nodes_;    // on [0,1]
  std::vector<double> gauss_weights_;  // sum to 1
};

}  // namespace gnhp

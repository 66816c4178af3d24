#pragma once

#include <functional>
#include <span>
#include <vector>

namespace teleqcp {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]. The panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// `abs_tol`. Interior `breakpoints` seed the initial panels. Throws
/// QuadratureNonConvergence when `max_panels` is exhausted.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, std::span<const double> breakpoints = {},
                                    int max_panels = 4000);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

/// Same rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

}  // namespace teleqcp

#pragma once

#include <functional>
#include <vector>

namespace landau_ee {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule1D gauss_legendre(int n);

// Composite Gauss-Legendre on [a, b]: `panels` equal panels, `order` nodes each.
Rule1D composite_gauss_legendre(double a, double b, int panels, int order);

// Gauss rule for integrals of products of Hermite functions: nodes are the
// zeros of H_n and the weights already absorb exp(x^2), so
// sum_k w_k psi_i(x_k) psi_j(x_k) is exact for i + j <= 2n - 1.
Rule1D gauss_hermite_functions(int n);

struct AdaptiveResult {
  double value;
  double error;
};

// Adaptive Gauss-Kronrod (7/15) with deterministic bisection.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_depth = 40);

}  // namespace landau_ee

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "landau_ee/geometry.hpp"
#include "landau_ee/spectra.hpp"

namespace landau_ee {

// (1/4 pi^2) int_0^1 f(t) / (t(1-t)) dt.
double i_functional(const TestPolynomial& f);

struct ReducedParameters {
  int K;
  double mu_residual;   // mu / (K B) - 2
  double length_scale;  // sqrt(K B): L' = length_scale * L
};

ReducedParameters reduce_parameters(double B, double mu);

enum class LogBranch { LnL, LnK };

std::string branch_name(LogBranch b);

struct RegimePrediction {
  LogBranch regime;
  double leading_value;
  double coefficient;
  double scale_argument;
};

// Ties K = L go to the ln K branch.
RegimePrediction predict_leading(const TestPolynomial& f, const Domain& d, int K, double L);

struct LogFit {
  double slope;
  double intercept;
  double r2;
};

// Least squares of y against ln x.
LogFit fit_log_coefficient(const std::vector<std::pair<double, double>>& points);

}  // namespace landau_ee

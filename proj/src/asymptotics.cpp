#include "landau_ee/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "landau_ee/errors.hpp"

namespace landau_ee {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double i_functional(const TestPolynomial& f) {
  if (!f.vanishes_at_one()) throw DomainError("i_functional: f(1) must vanish");
  double s = 0.0;
  for (const auto& [m, c] : f.basis_coeffs) s += c / m;
  return s / (4.0 * kPi * kPi);
}

ReducedParameters reduce_parameters(double B, double mu) {
  if (!(B > 0.0) || !(mu > 0.0)) throw DomainError("reduce_parameters: B and mu must be positive");
  const double x = mu / B;
  if (x < 1.0) throw DomainError("reduce_parameters: mu / B below 1 leaves no Landau level");
  // Guard the floor against representation error when (x - 1)/2 is an integer.
  const double q = (x - 1.0) / 2.0;
  const int K = static_cast<int>(std::floor(q + 1e-12 * std::max(1.0, q))) + 1;
  return {K, mu / (K * B) - 2.0, std::sqrt(K * B)};
}

std::string branch_name(LogBranch b) { return b == LogBranch::LnK ? "lnK" : "lnL"; }

RegimePrediction predict_leading(const TestPolynomial& f, const Domain& d, int K, double L) {
  if (!d.bounded()) throw DomainError("predict_leading: domain must be bounded");
  if (K < 1 || !(L > 0.0)) throw DomainError("predict_leading: need K >= 1 and L > 0");
  const double coef = 2.0 * std::sqrt(2.0) / kPi * i_functional(f);
  const double perimeter = boundary_length(d.with_scale(1.0));
  RegimePrediction r;
  r.regime = K <= L ? LogBranch::LnK : LogBranch::LnL;
  r.scale_argument = std::min(static_cast<double>(K), L);
  r.coefficient = coef;
  r.leading_value = coef * L * perimeter * std::log(r.scale_argument);
  return r;
}

LogFit fit_log_coefficient(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("fit_log_coefficient: need at least 3 points");
  std::set<double> xs;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0)) throw DomainError("fit_log_coefficient: x must be positive");
    if (!xs.insert(x).second) throw DomainError("fit_log_coefficient: repeated x");
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += std::log(x);
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx, dy = y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (const auto& [x, y] : points) {
    const double e = y - fit.intercept - fit.slope * std::log(x);
    sse += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

}  // namespace landau_ee

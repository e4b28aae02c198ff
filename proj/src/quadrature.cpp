#include "landau_ee/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "landau_ee/errors.hpp"
#include "landau_ee/specfun.hpp"

namespace landau_ee {

Rule1D gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

Rule1D composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw DomainError("composite_gauss_legendre: panels must be positive");
  Rule1D base = gauss_legendre(order);
  Rule1D r;
  r.nodes.reserve(static_cast<std::size_t>(panels) * order);
  r.weights.reserve(r.nodes.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double mid = a + (p + 0.5) * h;
    for (int k = 0; k < order; ++k) {
      r.nodes.push_back(mid + 0.5 * h * base.nodes[k]);
      r.weights.push_back(0.5 * h * base.weights[k]);
    }
  }
  return r;
}

Rule1D gauss_hermite_functions(int n) {
  if (n < 1) throw DomainError("gauss_hermite_functions: n must be positive");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac, Eigen::EigenvaluesOnly);
  Rule1D r;
  r.nodes.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  r.weights.resize(n);
  std::vector<double> psi(n);
  for (int k = 0; k < n; ++k) {
    // Christoffel numbers for the orthonormal Hermite functions.
    hermite_psi_all(r.nodes[k], psi);
    double s = 0.0;
    for (double v : psi) s += v * v;
    r.weights[k] = 1.0 / s;
  }
  return r;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<double(double)>& f, double a, double b, double& val, double& err) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double rk = fc * kWgk[7], rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double s = f(c - x) + f(c + x);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  val = rk * h;
  err = std::abs((rk - rg) * h);
}

void adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
           double whole, double whole_err, AdaptiveResult& acc) {
  if (whole_err <= tol || depth <= 0) {
    acc.value += whole;
    acc.error += whole_err;
    return;
  }
  double m = 0.5 * (a + b);
  double lv, le, rv, re;
  gk15(f, a, m, lv, le);
  gk15(f, m, b, rv, re);
  adapt(f, a, m, 0.5 * tol, depth - 1, lv, le, acc);
  adapt(f, m, b, 0.5 * tol, depth - 1, rv, re, acc);
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_depth) {
  AdaptiveResult acc{0.0, 0.0};
  if (a == b) return acc;
  double v, e;
  gk15(f, a, b, v, e);
  double tol = std::max(abs_tol, rel_tol * std::abs(v));
  adapt(f, a, b, tol, max_depth, v, e, acc);
  return acc;
}

}  // namespace landau_ee

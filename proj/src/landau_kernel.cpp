#include "landau_ee/landau_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "landau_ee/errors.hpp"
#include "landau_ee/quadrature.hpp"

namespace landau_ee {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCdThreshold = 1e-8;

double direct_hermite_sum(int K, double x, double y) {
  std::vector<double> px(K), py(K);
  hermite_psi_all(x, px);
  hermite_psi_all(y, py);
  double s = 0.0;
  for (int l = 0; l < K; ++l) s += px[l] * py[l];
  return s;
}

}  // namespace

LandauParams::LandauParams(int k) : K(k) {
  if (k < 1) throw DomainError("LandauParams: K must be at least 1");
}

double g_K_exact(const LandauParams& p, double t) {
  if (!(t >= 0.0)) throw DomainError("g_K_exact: t must be nonnegative");
  const double x = 4.0 * t * t / p.K;
  return laguerre_weighted(p.K - 1, 1.0, x) / (2.0 * kPi * p.K);
}

double f_K_alpha(const LandauParams& p, double alpha, double x) {
  if (!(alpha == -0.5 || alpha == 0.5 || alpha == 1.0))
    throw DomainError("f_K_alpha: alpha must be -1/2, 1/2 or 1");
  if (!(x > 0.0)) throw DomainError("f_K_alpha: x must be positive");
  if (x == 1.0) throw DomainError("f_K_alpha: x = 1 is excluded");
  const double nu = p.nu(alpha);
  return std::pow(2.0, alpha) * std::sqrt(nu) * std::pow(x, 0.5 * alpha + 0.25) *
         std::pow(std::abs(1.0 - x), 0.25) * laguerre_weighted(p.K - 1, alpha, nu * x);
}

std::complex<double> p_K(const LandauParams& p, Point2 x, Point2 y) {
  const double wedge = x.x * y.y - x.y * y.x;
  const double r = std::hypot(x.x - y.x, x.y - y.y);
  const double g = g_K_exact(p, r / std::sqrt(8.0));
  const double phase = wedge / (2.0 * p.K);
  return {g * std::cos(phase), g * std::sin(phase)};
}

double bessel_small_value(double t) {
  if (t == 0.0) return 1.0 / (2.0 * kPi);
  return bessel_j(1.0, 4.0 * t) / (4.0 * kPi * t);
}

double oscillatory_bulk_value(int K, double t) {
  const double r = t / K;
  return std::cos(omega_K(K, t) - 0.75 * kPi) /
         (4.0 * std::sqrt(2.0) * std::pow(kPi, 1.5) * std::pow(t, 1.5) *
          std::pow((1.0 - r) * (1.0 + r), 0.25));
}

double bessel_small_shape(int K, double t) {
  const double k = K;
  return std::pow(t, 1.5) / (k * k) + 1.0 / (k * std::pow(1.0 + t, 1.5));
}

double oscillatory_bulk_shape(double t) { return std::pow(t, -2.5); }

double airy_transition_shape(int K, double t) {
  const double gap = std::abs(1.0 - t / K);
  if (gap == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (std::pow(static_cast<double>(K), 1.5) * std::pow(gap, 0.25));
}

namespace {

struct Candidate {
  RegimeLabel regime;
  double estimate;
};

// Candidates valid at t, in a fixed order; the smaller estimate wins in overlaps.
Candidate pick_regime(const LandauParams& p, double t, const CalibrationTable& table) {
  const double K = p.K;
  const double bessel_edge = std::pow(K, 2.0 / 3.0);
  const double bulk_edge = K / std::sqrt(2.0);
  const double airy_edge = std::sqrt(1.5) * K;
  bool bessel_ok = t <= bessel_edge;
  bool bulk_ok = t >= 1.0 && t <= bulk_edge;
  if (bessel_ok || bulk_ok) {
    double eb = bessel_ok ? table.at(bound_id::kBesselSmall).C * bessel_small_shape(p.K, t)
                          : std::numeric_limits<double>::infinity();
    double eo = bulk_ok ? table.at(bound_id::kOscillatoryBulk).C * oscillatory_bulk_shape(t)
                        : std::numeric_limits<double>::infinity();
    if (eb <= eo) return {RegimeLabel::BesselSmall, eb};
    return {RegimeLabel::OscillatoryBulk, eo};
  }
  if (t <= airy_edge) {
    return {RegimeLabel::AiryTransition,
            table.at(bound_id::kAiryTransition).C * airy_transition_shape(p.K, t)};
  }
  const BoundConstants& c = table.at(bound_id::kExponentialTail);
  return {RegimeLabel::ExponentialTail, c.C * std::exp(-c.beta * t)};
}

}  // namespace

RegimeLabel regime_of(const LandauParams& p, double t, const CalibrationTable& table) {
  return pick_regime(p, t, table).regime;
}

KernelValue g_K_asymptotic(const LandauParams& p, double t, const CalibrationTable& table) {
  if (!(t >= 0.0)) throw DomainError("g_K_asymptotic: t must be nonnegative");
  Candidate c = pick_regime(p, t, table);
  double value = 0.0;
  switch (c.regime) {
    case RegimeLabel::BesselSmall: value = bessel_small_value(t); break;
    case RegimeLabel::OscillatoryBulk: value = oscillatory_bulk_value(p.K, t); break;
    case RegimeLabel::AiryTransition: value = g_K_exact(p, t); break;
    case RegimeLabel::ExponentialTail: value = 0.0; break;
  }
  return {value, c.regime, c.estimate};
}

double gk_tail_integral(const LandauParams& p, double R) {
  if (!(R >= 0.0)) throw DomainError("gk_tail_integral: R must be nonnegative");
  const double r_max = std::max(4.0 * p.K, R + 50.0);
  // Panels on a fixed lattice of width 1/2 so that results for nearby R share nodes.
  static const Rule1D rule = gauss_legendre(12);
  auto panel = [&](double a, double b) {
    double h = 0.5 * (b - a), m = 0.5 * (a + b), s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      double t = m + h * rule.nodes[k];
      double g = g_K_exact(p, t);
      s += rule.weights[k] * g * g * t;
    }
    return s * h;
  };
  const double width = 0.5;
  double first = std::ceil(R / width) * width;
  if (first == R) first += width;
  std::vector<double> parts;
  parts.push_back(panel(R, std::min(first, r_max)));
  for (double a = first; a < r_max; a += width) parts.push_back(panel(a, std::min(a + width, r_max)));
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

double p_infinity(Point2 x, Point2 y) {
  const double r = std::hypot(x.x - y.x, x.y - y.y);
  if (r == 0.0) return 1.0 / (2.0 * kPi);
  const double a = std::sqrt(2.0) * r;
  return bessel_j(1.0, a) / (std::sqrt(2.0) * kPi * r);
}

double hermite_kernel_cd(int K, double x, double y, double psi_km1_x, double psi_k_x,
                         double psi_km1_y, double psi_k_y) {
  if (std::abs(x - y) <= kCdThreshold) return direct_hermite_sum(K, x, y);
  return std::sqrt(0.5 * K) * (psi_k_x * psi_km1_y - psi_km1_x * psi_k_y) / (x - y);
}

double hermite_kernel(const LandauParams& p, double x, double y) {
  if (std::abs(x - y) <= kCdThreshold) return direct_hermite_sum(p.K, x, y);
  std::vector<double> px(p.K + 1), py(p.K + 1);
  hermite_psi_all(x, px);
  hermite_psi_all(y, py);
  return hermite_kernel_cd(p.K, x, y, px[p.K - 1], px[p.K], py[p.K - 1], py[p.K]);
}

double sine_kernel(double s, double t) {
  const double d = s - t;
  if (d == 0.0) return 1.0 / kPi;
  return std::sin(d) / (kPi * d);
}

double eta_scaled(double lambda, double x) {
  const double r = std::sqrt(lambda);
  return lambda * eta(x / r).real();
}

double eta_scaled_inverse(double lambda, double u) {
  return std::sqrt(lambda) * eta_inverse(u / lambda);
}

double eta_scaled_inverse_derivative(double lambda, double u) {
  const double x = eta_scaled_inverse(lambda, u);
  return 1.0 / std::sqrt(lambda - x * x);
}

double hat_kernel(const LandauParams& p, double s, double t) {
  const double lambda = 2.0 * p.K - 1.0;
  const double edge = lambda * 0.25 * kPi;
  if (!(std::abs(s) < edge && std::abs(t) < edge))
    throw DomainError("hat_kernel: arguments outside the open rescaled range");
  const double xs = eta_scaled_inverse(lambda, s);
  const double xt = eta_scaled_inverse(lambda, t);
  const double js = 1.0 / std::sqrt(lambda - xs * xs);
  const double jt = 1.0 / std::sqrt(lambda - xt * xt);
  return std::sqrt(js * jt) * hermite_kernel(p, xs, xt);
}

std::string CalibrationGrid::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "G_K grid K=" << K << " t=[0," << t_max_factor << "K] dt=" << dt;
  return os.str();
}

CalibrationTable calibrate_kernel_bounds(const CalibrationGrid& grid) {
  const LandauParams p(grid.K);
  const double K = grid.K;
  const std::string hash = grid_hash(grid.describe());
  const double bessel_edge = std::pow(K, 2.0 / 3.0);
  const double bulk_edge = K / std::sqrt(2.0);
  const double airy_edge = std::sqrt(1.5) * K;
  const double safety = 2.0;

  double r_bessel = 0, r_bulk = 0, r_airy = 0;
  std::vector<std::pair<double, double>> tail;  // (t, |G|)
  const int n = static_cast<int>(std::floor(grid.t_max_factor * K / grid.dt + 1e-9));
  for (int i = 0; i <= n; ++i) {
    const double t = i * grid.dt;
    const double g = g_K_exact(p, t);
    if (t <= bessel_edge)
      r_bessel = std::max(r_bessel, std::abs(g - bessel_small_value(t)) / bessel_small_shape(grid.K, t));
    if (t >= 1.0 && t <= bulk_edge)
      r_bulk = std::max(r_bulk, std::abs(g - oscillatory_bulk_value(grid.K, t)) / oscillatory_bulk_shape(t));
    if (t > bulk_edge && t <= airy_edge)
      r_airy = std::max(r_airy, std::abs(g) / airy_transition_shape(grid.K, t));
    if (t > airy_edge && g != 0.0) tail.emplace_back(t, std::abs(g));
  }
  CalibrationTable table;
  table.set(bound_id::kBesselSmall, {safety * r_bessel, 0.0, hash});
  table.set(bound_id::kOscillatoryBulk, {safety * r_bulk, 0.0, hash});
  table.set(bound_id::kAiryTransition, {safety * r_airy, 0.0, hash});

  // Decay rate measured from the origin, softened by 0.8, then the smallest C
  // that dominates every sampled tail point.
  double beta = std::numeric_limits<double>::infinity();
  for (const auto& [t, g] : tail) beta = std::min(beta, -std::log(g) / t);
  beta = tail.empty() ? 0.1 : 0.8 * beta;
  double c_tail = 0.0;
  for (const auto& [t, g] : tail) c_tail = std::max(c_tail, std::exp(std::log(g) + beta * t));
  table.set(bound_id::kExponentialTail, {safety * c_tail, beta, hash});
  return table;
}

}  // namespace landau_ee

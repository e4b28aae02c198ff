#include "landau_ee/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "landau_ee/errors.hpp"

namespace landau_ee {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRescaleAbove = 1e150;
constexpr double kRescaleFactor = 1e-150;
const double kLogRescale = std::log(1e150);

// Point where Ai and Bi cross on the negative axis.
constexpr double kAiryEnvCrossing = -0.36605;

double scaled_value(double v, double log_scale) {
  if (v == 0.0) return 0.0;
  const double e = std::exp(log_scale);
  if (std::isnormal(e) && std::isfinite(v * e)) return v * e;
  return std::copysign(std::exp(std::log(std::abs(v)) + log_scale), v);
}

double w_minus_sin(double w) {
  if (std::abs(w) > 0.3) return w - std::sin(w);
  // w^3/3! - w^5/5! + ...
  double w2 = w * w, term = w * w2 / 6.0, sum = 0.0;
  for (int k = 1; k < 9; ++k) {
    sum += term;
    term *= -w2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return sum;
}

double sinh_minus_w(double w) {
  if (std::abs(w) > 0.3) return std::sinh(w) - w;
  double w2 = w * w, term = w * w2 / 6.0, sum = 0.0;
  for (int k = 1; k < 9; ++k) {
    sum += term;
    term *= w2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return sum;
}

bool is_order(double alpha, double target) { return alpha == target; }

void check_order(double alpha) {
  if (!(is_order(alpha, -0.5) || is_order(alpha, 0.5) || is_order(alpha, 1.0) ||
        is_order(alpha, 2.0)))
    throw DomainError("bessel order must be one of -1/2, 1/2, 1, 2");
}

// Hankel large-argument expansion: J = sqrt(2/(pi s)) (P cos chi - Q sin chi),
// Y = sqrt(2/(pi s)) (P sin chi + Q cos chi).
void hankel_pq(double nu, double s, double& p, double& q) {
  const double mu = 4.0 * nu * nu;
  p = 1.0;
  q = 0.0;
  double term = 1.0, prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * s);
    if (std::abs(term) > std::abs(prev) && k > 2) break;
    if (term == 0.0) break;
    int r = k % 4;
    if (r == 1) q += term;
    else if (r == 2) p -= term;
    else if (r == 3) q -= term;
    else p += term;
    if (std::abs(term) < 1e-17) break;
    prev = term;
  }
}

double bessel_j_series(int n, double s) {
  double half = 0.5 * s, x2 = -half * half;
  double term = 1.0;
  for (int j = 1; j <= n; ++j) term *= half / j;
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) && k > 2) break;
    term *= x2 / ((k + 1.0) * (k + 1.0 + n));
  }
  return sum;
}

// DLMF 10.8.1 for integer order n.
double bessel_y_series(int n, double s) {
  constexpr double kEuler = 0.57721566490153286061;
  double half = 0.5 * s, q = half * half;
  double finite = 0.0;
  if (n > 0) {
    // sum_{k<n} (n-k-1)!/k! q^k
    double fact_nk1 = std::tgamma(static_cast<double>(n));
    double qk = 1.0, kfact = 1.0;
    for (int k = 0; k < n; ++k) {
      finite += fact_nk1 / kfact * qk;
      qk *= q;
      kfact *= (k + 1.0);
      if (n - k - 1 > 0) fact_nk1 /= (n - k - 1.0);
    }
    finite *= -std::pow(half, -n) / kPi;
  }
  double log_part = 2.0 / kPi * std::log(half) * bessel_j_series(n, s);
  // psi(k+1) + psi(n+k+1), psi(m+1) = -gamma + H_m
  double h_k = 0.0, h_nk = 0.0;
  for (int j = 1; j <= n; ++j) h_nk += 1.0 / j;
  double term = 1.0;
  for (int j = 1; j <= n; ++j) term /= j;
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    double contrib = (h_k + h_nk - 2.0 * kEuler) * term;
    sum += contrib;
    if (std::abs(term) < 1e-19 && k > 2) break;
    term *= -q / ((k + 1.0) * (k + 1.0 + n));
    h_k += 1.0 / (k + 1.0);
    h_nk += 1.0 / (k + 1.0 + n);
  }
  return finite + log_part - std::pow(half, n) / kPi * sum;
}

double env_crossing(double alpha) {
  // Smallest positive root of J_alpha = Y_alpha, located by scan plus bisection.
  auto diff = [alpha](double x) { return bessel_j(alpha, x) - bessel_y(alpha, x); };
  double a = 1e-3, fa = diff(a);
  for (double b = a + 0.01; b < 20.0; b += 0.01) {
    double fb = diff(b);
    if ((fa > 0) != (fb > 0)) {
      for (int it = 0; it < 100; ++it) {
        double m = 0.5 * (a + b), fm = diff(m);
        if ((fm > 0) == (fa > 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    a = b;
    fa = fb;
  }
  return 0.0;
}

struct AirySeries {
  double ai, aip, bi, bip;
};

// Maclaurin series, summed in extended precision: for s near 6 the two
// components cancel by about eight digits in Ai.
AirySeries airy_series(double zd) {
  using ld = long double;
  const ld z = zd, z3 = z * z * z;
  // f = sum A_k z^{3k}, g = sum B_k z^{3k+1}
  ld f = 0, fp = 0, g = 0, gp = 0;
  ld a_k = 1, b_k = 1, zpow = 1;  // zpow = z^{3k}
  for (int k = 0; k < 80; ++k) {
    ld tf = a_k * zpow, tg = b_k * zpow * z;
    f += tf;
    g += tg;
    if (k > 0) fp += 3.0L * k * a_k * zpow / z;
    gp += (3.0L * k + 1.0L) * b_k * zpow;
    if (std::abs(tf) + std::abs(tg) < 1e-22L * (std::abs(f) + std::abs(g)) && k > 2) break;
    a_k /= (3.0L * k + 2.0L) * (3.0L * k + 3.0L);
    b_k /= (3.0L * k + 3.0L) * (3.0L * k + 4.0L);
    zpow *= z3;
  }
  const ld c1 = 0.355028053887817239260063186004183176L;
  const ld c2 = 0.258819403792806798405183560189203963L;
  const ld r3 = 1.732050807568877293527446341505872367L;
  return {static_cast<double>(c1 * f - c2 * g), static_cast<double>(c1 * fp - c2 * gp),
          static_cast<double>(r3 * (c1 * f + c2 * g)), static_cast<double>(r3 * (c1 * fp + c2 * gp))};
}

// u_k, v_k coefficients of the Airy asymptotic expansions, summed with a
// smallest-term cutoff.
struct AiryAsymSums {
  double u_all_alt, v_all_alt;        // sum (-1)^k u_k / z^k
  double u_all, v_all;                // sum u_k / z^k
  double u_even, u_odd, v_even, v_odd;  // alternating sums over even / odd k
};

AiryAsymSums airy_asym_sums(double zeta_arg) {
  AiryAsymSums r{};
  double u = 1.0, v = 1.0, zp = 1.0, prev = 1e300;
  for (int k = 0; k < 40; ++k) {
    if (k > 0) {
      u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
      v = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u;
      zp *= zeta_arg;
    }
    double tu = u / zp, tv = v / zp;
    double mag = std::abs(tu) + std::abs(tv);
    if (mag > prev) break;
    prev = mag;
    double alt = (k % 2 == 0) ? 1.0 : -1.0;
    r.u_all_alt += alt * tu;
    r.v_all_alt += alt * tv;
    r.u_all += tu;
    r.v_all += tv;
    double half_alt = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      r.u_even += half_alt * tu;
      r.v_even += half_alt * tv;
    } else {
      r.u_odd += half_alt * tu;
      r.v_odd += half_alt * tv;
    }
    if (mag < 1e-18) break;
  }
  return r;
}

}  // namespace

std::string_view regime_name(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::BesselSmall: return "BesselSmall";
    case RegimeLabel::OscillatoryBulk: return "OscillatoryBulk";
    case RegimeLabel::AiryTransition: return "AiryTransition";
    case RegimeLabel::ExponentialTail: return "ExponentialTail";
  }
  return "?";
}

void hermite_psi_all(double s, std::span<double> out) {
  const std::size_t n = out.size();
  if (n == 0) return;
  double log_scale = -0.5 * s * s;
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25);
  out[0] = scaled_value(cur, log_scale);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double next = std::sqrt(2.0 / (k + 1.0)) * s * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleAbove) {
      cur *= kRescaleFactor;
      prev *= kRescaleFactor;
      log_scale += kLogRescale;
    }
    out[k + 1] = scaled_value(cur, log_scale);
  }
}

double hermite_psi(int ell, double s) {
  if (ell < 0) throw DomainError("hermite_psi: ell must be nonnegative");
  double log_scale = -0.5 * s * s;
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25);
  for (int k = 0; k < ell; ++k) {
    double next = std::sqrt(2.0 / (k + 1.0)) * s * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleAbove) {
      cur *= kRescaleFactor;
      prev *= kRescaleFactor;
      log_scale += kLogRescale;
    }
  }
  return scaled_value(cur, log_scale);
}

double laguerre(int n, double alpha, double x) {
  if (n < 0) throw DomainError("laguerre: n must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre_weighted(int n, double alpha, double x) {
  if (n < 0) throw DomainError("laguerre_weighted: n must be nonnegative");
  double log_scale = -0.5 * x;
  double prev = 1.0, cur = (n == 0) ? 1.0 : 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleAbove) {
      cur *= kRescaleFactor;
      prev *= kRescaleFactor;
      log_scale += kLogRescale;
    }
  }
  return scaled_value(cur, log_scale);
}

double bessel_j(double alpha, double s) {
  check_order(alpha);
  if (s < 0.0) throw DomainError("bessel_j: argument must be nonnegative");
  if (alpha == -0.5) {
    if (s == 0.0) throw DomainError("bessel_j: J_{-1/2} is singular at 0");
    return std::sqrt(2.0 / (kPi * s)) * std::cos(s);
  }
  if (alpha == 0.5) {
    if (s == 0.0) return 0.0;
    return std::sqrt(2.0 / (kPi * s)) * std::sin(s);
  }
  int n = static_cast<int>(alpha);
  if (s <= 12.0) return bessel_j_series(n, s);
  double p, q;
  hankel_pq(alpha, s, p, q);
  double chi = s - 0.5 * alpha * kPi - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * s)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_y(double alpha, double s) {
  check_order(alpha);
  if (s <= 0.0) throw DomainError("bessel_y: argument must be positive");
  if (alpha == -0.5) return std::sqrt(2.0 / (kPi * s)) * std::sin(s);
  if (alpha == 0.5) return -std::sqrt(2.0 / (kPi * s)) * std::cos(s);
  int n = static_cast<int>(alpha);
  if (s <= 12.0) return bessel_y_series(n, s);
  double p, q;
  hankel_pq(alpha, s, p, q);
  double chi = s - 0.5 * alpha * kPi - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * s)) * (p * std::sin(chi) + q * std::cos(chi));
}

double bessel_env(double alpha, double s) {
  check_order(alpha);
  if (s <= 0.0) throw DomainError("bessel_env: argument must be positive");
  static const double crossing[4] = {env_crossing(-0.5), env_crossing(0.5), env_crossing(1.0),
                                     env_crossing(2.0)};
  int idx = alpha == -0.5 ? 0 : alpha == 0.5 ? 1 : alpha == 1.0 ? 2 : 3;
  double j = bessel_j(alpha, s);
  if (s < crossing[idx]) return std::sqrt(2.0) * std::abs(j);
  double y = bessel_y(alpha, s);
  return std::sqrt(j * j + y * y);
}

AiryValue airy(double s) {
  AiryValue out{};
  if (std::abs(s) <= 6.0) {
    AirySeries r = airy_series(s);
    out.ai = r.ai;
    out.ai_prime = r.aip;
    out.bi = r.bi;
  } else if (s > 6.0) {
    double z = 2.0 / 3.0 * s * std::sqrt(s);
    double q = std::pow(s, 0.25);
    AiryAsymSums a = airy_asym_sums(z);
    double e = std::exp(-z);
    out.ai = e / (2.0 * std::sqrt(kPi) * q) * a.u_all_alt;
    out.ai_prime = -q * e / (2.0 * std::sqrt(kPi)) * a.v_all_alt;
    out.bi = std::exp(z) / (std::sqrt(kPi) * q) * a.u_all;
  } else {
    double x = -s;
    double z = 2.0 / 3.0 * x * std::sqrt(x);
    double q = std::pow(x, 0.25);
    AiryAsymSums a = airy_asym_sums(z);
    double c = std::cos(z - 0.25 * kPi), sn = std::sin(z - 0.25 * kPi);
    double norm = 1.0 / (std::sqrt(kPi) * q);
    out.ai = norm * (c * a.u_even + sn * a.u_odd);
    out.bi = norm * (-sn * a.u_even + c * a.u_odd);
    out.ai_prime = q / std::sqrt(kPi) * (sn * a.v_even - c * a.v_odd);
  }
  out.env = (s >= kAiryEnvCrossing) ? out.ai : std::sqrt(out.ai * out.ai + out.bi * out.bi);
  return out;
}

std::complex<double> eta(double t) {
  if (!(t >= -1.0)) throw DomainError("eta: t must be >= -1");
  if (t <= 1.0) {
    return {0.5 * (t * std::sqrt((1.0 - t) * (1.0 + t)) + std::asin(t)), 0.0};
  }
  return {0.25 * kPi, 0.5 * (t * std::sqrt((t - 1.0) * (t + 1.0)) - std::acosh(t))};
}

double eta_inverse(double u) {
  const double top = 0.25 * kPi;
  if (!(std::abs(u) <= top + 1e-15)) throw DomainError("eta_inverse: u outside [-pi/4, pi/4]");
  if (u >= top) return 1.0;
  if (u <= -top) return -1.0;
  double lo = -1.0, hi = 1.0;
  double t = u / top;  // eta is close to linear with slope ~1 near 0
  t = std::clamp(t, -1.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    double f = eta(t).real() - u;
    if (f > 0) hi = t;
    else lo = t;
    double d = std::sqrt(std::max(0.0, (1.0 - t) * (1.0 + t)));
    double next = (d > 0) ? t - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-15 || hi - lo < 1e-15) return next;
    t = next;
  }
  return t;
}

double xi(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("xi: x outside [0,1]");
  return 0.5 * (std::sqrt(x * (1.0 - x)) + std::asin(std::sqrt(x)));
}

double zeta(double x) {
  if (!(x >= 0.0)) throw DomainError("zeta: x must be nonnegative");
  if (x <= 1.0) {
    double w = 2.0 * std::atan2(std::sqrt(1.0 - x), std::sqrt(x));
    return -std::pow(0.375 * w_minus_sin(w), 2.0 / 3.0);
  }
  double w = 2.0 * std::asinh(std::sqrt(x - 1.0));
  return std::pow(0.375 * sinh_minus_w(w), 2.0 / 3.0);
}

double omega_K(int K, double t) {
  if (K < 1) throw DomainError("omega_K: K must be positive");
  if (!(t >= 0.0 && t <= K * (1.0 + 1e-14))) throw DomainError("omega_K: t outside [0, K]");
  double r = std::min(1.0, t / K);
  return 2.0 * (t * std::sqrt((1.0 - r) * (1.0 + r)) + K * std::asin(r));
}

double f0_coefficient(double x) {
  if (!(x > 0.5)) throw DomainError("f0_coefficient: x must exceed 1/2");
  double s = x - 1.0;
  if (std::abs(s) < 1e-3) {
    const double c = std::cbrt(2.0);
    return c * (12.0 / 35.0 + s * (-32.0 / 225.0 + s * (63796.0 / 606375.0 - s * 689512.0 / 7882875.0)));
  }
  double z = zeta(x);
  double r = x / s;
  return -5.0 / (48.0 * z * z) +
         std::sqrt(s / (x * z)) * (0.5 - 0.125 - 0.25 * r + 5.0 / 24.0 * r * r);
}

}  // namespace landau_ee

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "landau_ee/errors.hpp"
#include "landau_ee/landau_kernel.hpp"
#include "landau_ee/quadrature.hpp"
#include "landau_ee/spectra.hpp"
#include "oracles.hpp"

using namespace landau_ee;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("LandauParams") {
  const LandauParams p(7);
  CHECK(p.nu(1.0) == 28.0);
  CHECK(p.nu(0.5) == 27.0);
  CHECK(p.nu(-0.5) == 25.0);
  CHECK_THROWS_AS(LandauParams(0), DomainError);
}

TEST_CASE("g_K_exact closed values and high precision") {
  for (int K : {1, 10, 100}) CHECK(g_K_exact(LandauParams(K), 0.0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  for (double t : {0.1, 0.7, 2.0})
    CHECK(g_K_exact(LandauParams(1), t) == doctest::Approx(std::exp(-2.0 * t * t) / (2.0 * kPi)).epsilon(1e-14));
  const double ref = static_cast<double>(oracle::g_K(20, oracle::hp(5)));
  CHECK(g_K_exact(LandauParams(20), 5.0) == doctest::Approx(ref).epsilon(1e-9));
  for (double t : {0.3, 11.0, 37.5}) {
    const double r = static_cast<double>(oracle::g_K(60, oracle::hp(t)));
    CHECK(std::abs(g_K_exact(LandauParams(60), t) - r) <= 1e-12 * (std::abs(r) + 1e-6));
  }
}

TEST_CASE("f_K_alpha links to G_K and to its Bessel and tail regimes") {
  const LandauParams p(30);
  for (double t : {1.0, 5.0, 15.0}) {
    const double x = t * t / (30.0 * 30.0);
    const double g = f_K_alpha(p, 1.0, x) / (8.0 * kPi * std::pow(t, 1.5) * std::pow(std::abs(1.0 - x), 0.25));
    CHECK(g == doctest::Approx(g_K_exact(p, t)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(f_K_alpha(p, 1.0, 1.0), DomainError);
  const LandauParams q(50);
  const double arg = q.nu(1.0) * xi(0.25);
  CHECK(std::abs(f_K_alpha(q, 1.0, 0.25) - std::sqrt(arg) * bessel_j(1.0, arg)) * 50.0 <= 0.05);
  // exponential decay in K x beyond the turning point
  for (double x : {2.0, 3.0}) CHECK(std::abs(f_K_alpha(q, 1.0, x)) <= std::exp(-0.25 * 50.0 * x));
}

TEST_CASE("p_K diagonal, Hermiticity and modulus") {
  const LandauParams p(9);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  CHECK(p_K(p, {1.5, -2.0}, {1.5, -2.0}) == std::complex<double>(1.0 / (2.0 * kPi), 0.0));
  for (int i = 0; i < 100; ++i) {
    const Point2 x{u(rng), u(rng)}, y{u(rng), u(rng)};
    CHECK(p_K(p, x, y) == std::conj(p_K(p, y, x)));
    const double r = std::hypot(x.x - y.x, x.y - y.y);
    CHECK(std::abs(p_K(p, x, y)) == doctest::Approx(std::abs(g_K_exact(p, r / std::sqrt(8.0)))).epsilon(1e-14));
  }
}

TEST_CASE("g_K_asymptotic examples") {
  const LandauParams p200(200);
  const KernelValue a = g_K_asymptotic(p200, 0.5);
  CHECK(a.regime == RegimeLabel::BesselSmall);
  CHECK(a.value.real() == doctest::Approx(bessel_j(1.0, 2.0) / (2.0 * kPi)).epsilon(1e-14));
  CHECK(std::abs(g_K_exact(p200, 0.5) - a.value.real()) <= a.error_estimate);

  const KernelValue b = g_K_asymptotic(p200, 50.0);
  CHECK(std::abs(g_K_exact(p200, 50.0) - b.value.real()) <= b.error_estimate);

  const LandauParams p50(50);
  const KernelValue c = g_K_asymptotic(p50, 100.0);
  CHECK(c.regime == RegimeLabel::ExponentialTail);
  CHECK(c.value == std::complex<double>(0.0, 0.0));
  CHECK(std::abs(g_K_exact(p50, 100.0)) <= c.error_estimate);

  CHECK(regime_of(p200, 150.0) == RegimeLabel::AiryTransition);
  CHECK(regime_of(p200, 100.0) == RegimeLabel::OscillatoryBulk);
}

TEST_CASE("asymptotic envelope transfers from the calibration K") {
  for (int K : {50, 200}) {
    const LandauParams p(K);
    int pass = 0, total = 0;
    for (double t = 0.0; t <= 2.5 * K; t += 0.25) {
      const KernelValue v = g_K_asymptotic(p, t);
      ++total;
      if (std::abs(g_K_exact(p, t) - v.value.real()) <= v.error_estimate) ++pass;
    }
    CHECK(pass >= 0.95 * total);
  }
}

TEST_CASE("calibration table round trip and reproduction") {
  const CalibrationTable& t = CalibrationTable::builtin();
  CHECK(t.contains(bound_id::kExponentialTail));
  CHECK(t.at(bound_id::kExponentialTail).beta > 0.0);
  const CalibrationTable back = CalibrationTable::parse(t.serialize());
  CHECK(back.serialize() == t.serialize());
  CHECK_THROWS_AS(t.at("no_such_bound"), DomainError);
  CHECK(calibrate_kernel_bounds(CalibrationGrid{}).serialize() == t.serialize());
}

TEST_CASE("gk_tail_integral identity, decay and monotonicity") {
  // int_0^inf G_K^2 t dt is fixed by the reproducing property: 1/(32 pi^2)
  for (int K : {10, 20, 50, 200})
    CHECK(gk_tail_integral(LandauParams(K), 0.0) == doctest::Approx(1.0 / (32.0 * kPi * kPi)).epsilon(1e-9));
  const LandauParams p20(20);
  double oracle_sum = 0.0;
  for (int k = 0; k < 200; ++k)
    oracle_sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return std::pow(g_K_exact(p20, t), 2) * t; }, 0.5 * k, 0.5 * (k + 1), 0, 1e-14);
  CHECK(gk_tail_integral(p20, 0.0) == doctest::Approx(oracle_sum).epsilon(1e-6));

  double c_fit = 0.0;
  const LandauParams p10(10);
  for (double R = 0.0; R < 20.0; R += 0.5) c_fit = std::max(c_fit, gk_tail_integral(p10, R) * (1.0 + R));
  for (int K : {50, 200}) {
    const LandauParams p(K);
    double prev = gk_tail_integral(p, 0.0);
    for (double R = K / 20.0; R < 2.0 * K; R += K / 20.0) {
      const double v = gk_tail_integral(p, R);
      CHECK(v <= prev);
      CHECK(v * (1.0 + R) <= 2.0 * c_fit);
      prev = v;
    }
  }
}

TEST_CASE("p_infinity and the pointwise large-K limit") {
  const Point2 x{0.3, -1.0}, y{2.0, 1.5};
  CHECK(p_infinity(x, x) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  CHECK(p_infinity(x, y) == p_infinity(y, x));
  double prev = 1.0;
  for (int K = 10; K <= 320; K *= 2) {
    const double d = std::abs(p_K(LandauParams(K), {0.0, 0.0}, {3.0, 0.0}) - p_infinity({0.0, 0.0}, {3.0, 0.0}));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("hermite_kernel trace, symmetry and reproducing property") {
  for (int K : {1, 5, 50}) {
    const LandauParams p(K);
    const Rule1D gh = gauss_hermite_functions(K + 2);
    double tr = 0.0;
    for (std::size_t q = 0; q < gh.nodes.size(); ++q) tr += gh.weights[q] * hermite_kernel(p, gh.nodes[q], gh.nodes[q]);
    CHECK(tr == doctest::Approx(K).epsilon(1e-10));
  }
  const LandauParams p40(40);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-9.0, 9.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), y = u(rng);
    double direct = 0.0;
    for (int l = 0; l < 40; ++l) direct += hermite_psi(l, x) * hermite_psi(l, y);
    CHECK(std::abs(hermite_kernel(p40, x, y) - direct) <= 1e-9);
    CHECK(hermite_kernel(p40, -x, -y) == doctest::Approx(hermite_kernel(p40, x, y)).epsilon(1e-12).scale(1e-12));
  }
  const LandauParams p12(12);
  const Rule1D gh = gauss_hermite_functions(16);
  for (auto [x, y] : {std::pair{0.2, -1.1}, std::pair{2.5, 2.5}, std::pair{-3.0, 1.0}}) {
    double s = 0.0;
    for (std::size_t q = 0; q < gh.nodes.size(); ++q)
      s += gh.weights[q] * hermite_kernel(p12, x, gh.nodes[q]) * hermite_kernel(p12, gh.nodes[q], y);
    CHECK(std::abs(s - hermite_kernel(p12, x, y)) <= 1e-8);
  }
}

TEST_CASE("sine_kernel") {
  CHECK(sine_kernel(1.7, 1.7) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
  CHECK(std::abs(sine_kernel(0.0, kPi)) < 1e-16);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double s = u(rng), t = u(rng);
    CHECK(std::abs(sine_kernel(s, t)) <= 1.0 / std::abs(s - t));
  }
}

TEST_CASE("hat_kernel diagonal, range and unitary equivalence") {
  const LandauParams p(50);
  const double lambda = 99.0;
  CHECK(hat_kernel(p, 0.0, 0.0) ==
        doctest::Approx(eta_scaled_inverse_derivative(lambda, 0.0) * hermite_kernel(p, 0.0, 0.0)).epsilon(1e-14));
  CHECK_THROWS_AS(hat_kernel(p, lambda * kPi / 4.0, 0.0), DomainError);

  // Spectra of 1_I K 1_I and of the rescaled kernel on eta(I) agree.
  const LandauParams p10(10);
  const double lam10 = 19.0;
  const double a = -1.0, b = 2.0;
  const Rule1D ri = composite_gauss_legendre(a, b, 12, 16);
  const Rule1D rh = composite_gauss_legendre(eta_scaled(lam10, a), eta_scaled(lam10, b), 12, 16);
  const auto e1 = eigenvalues(nystrom_restrict(KernelId::Hermite, p10, ri));
  const auto e2 = eigenvalues(nystrom_restrict(KernelId::Hat, p10, rh));
  for (int i = 0; i < 10; ++i) CHECK(std::abs(e1[i] - e2[i]) <= 1e-6);
}

TEST_CASE("rescaled kernel approaches the sine kernel") {
  double prev_max = 0.0;
  for (int K : {100, 200, 400}) {
    const SineReport r = sine_window_check(LandauParams(K), 200, 9, WindowPolicy::DeskScale);
    CHECK(r.max_scaled_residual < 1.0);
    if (prev_max > 0.0) CHECK(r.max_scaled_residual <= 2.0 * prev_max);
    prev_max = r.max_scaled_residual;
  }
}

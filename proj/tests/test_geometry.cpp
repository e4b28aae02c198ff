#include <doctest.h>

#include <cmath>
#include <random>

#include "landau_ee/errors.hpp"
#include "landau_ee/geometry.hpp"

using namespace landau_ee;

namespace {
constexpr double kPi = 3.14159265358979323846;

Domain hexagon(double L = 1.0) {
  std::vector<Point2> v;
  for (int k = 0; k < 6; ++k) v.push_back({std::cos(k * kPi / 3.0), std::sin(k * kPi / 3.0)});
  return Domain::polygon(v, L);
}

double lens_area(double R, double d) {
  if (d >= 2.0 * R) return 0.0;
  return 2.0 * R * R * std::acos(d / (2.0 * R)) - 0.5 * d * std::sqrt(4.0 * R * R - d * d);
}
}  // namespace

TEST_CASE("lengths, areas and diameters") {
  const Domain sq = Domain::unit_square(3.0);
  CHECK(area(sq) == doctest::Approx(9.0));
  CHECK(boundary_length(sq) == doctest::Approx(12.0));
  CHECK(diameter(sq) == doctest::Approx(3.0 * std::sqrt(2.0)));
  const Domain dk = Domain::disk({1.0, 2.0}, 0.5, 4.0);
  CHECK(area(dk) == doctest::Approx(4.0 * kPi));
  CHECK(boundary_length(dk) == doctest::Approx(4.0 * kPi));
  CHECK(diameter(dk) == doctest::Approx(4.0));
  const Domain hx = hexagon(2.0);
  CHECK(area(hx) == doctest::Approx(4.0 * 1.5 * std::sqrt(3.0)));
  CHECK(boundary_length(hx) == doctest::Approx(12.0));
  CHECK(sq.id() == "polygon4");
  CHECK(dk.id() == "disk");
  CHECK(hx.id() == "polygon6");
  CHECK_FALSE(Domain::strip(1.0, 0.0, INFINITY).bounded());
}

TEST_CASE("polygon validation and orientation") {
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 0}}), DomainError);
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), DomainError);
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), DomainError);
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), DomainError);
  CHECK_THROWS_AS(Domain::disk({0, 0}, -1.0), DomainError);
  CHECK_THROWS_AS(Domain::unit_square(0.0), DomainError);

  const Domain cw = Domain::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  const auto& v = std::get<Polygon>(cw.shape()).vertices;
  double signed_area = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    signed_area += a.x * b.y - b.x * a.y;
  }
  CHECK(signed_area > 0.0);
  CHECK(area(cw) == doctest::Approx(1.0));
}

TEST_CASE("containment") {
  const Domain hx = hexagon();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  int inside = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const Point2 x{u(rng), u(rng)};
    const bool c = contains(hx, x);
    // convex: inside iff on the left of every edge
    bool left = true;
    for (int k = 0; k < 6; ++k) {
      const Point2 a{std::cos(k * kPi / 3.0), std::sin(k * kPi / 3.0)};
      const Point2 b{std::cos((k + 1) * kPi / 3.0), std::sin((k + 1) * kPi / 3.0)};
      if ((b.x - a.x) * (x.y - a.y) - (b.y - a.y) * (x.x - a.x) < 0.0) left = false;
    }
    if (c != left) FAIL_CHECK("containment mismatch");
    inside += c;
  }
  CHECK(2.4 * 2.4 * inside / n == doctest::Approx(area(hx)).epsilon(1e-2));
  CHECK(contains(Domain::disk({0, 0}, 1.0, 2.0), {1.9, 0.0}));
  CHECK_FALSE(contains(Domain::disk({0, 0}, 1.0, 2.0), {2.1, 0.0}));
  CHECK(contains(Domain::strip(1.0, 0.0, 2.0, 3.0), {1.0, -3.0}));
}

TEST_CASE("translated overlap area") {
  const Domain sq = Domain::unit_square();
  for (auto [a, b] : {std::pair{0.2, 0.3}, std::pair{-0.5, 0.1}, std::pair{0.9, -0.9}})
    CHECK(translated_overlap_area(sq, {a, b}) == doctest::Approx((1 - std::abs(a)) * (1 - std::abs(b))).epsilon(1e-12));
  CHECK(translated_overlap_area(sq, {1.5, 0.0}) == doctest::Approx(0.0).scale(1.0));
  const Domain dk = Domain::disk({0, 0}, 1.0, 2.0);
  for (double d : {0.0, 0.7, 2.5, 3.9}) CHECK(translated_overlap_area(dk, {d, 0.0}) == doctest::Approx(lens_area(2.0, d)).epsilon(1e-9));
}

TEST_CASE("boundary overlap F") {
  for (double L : {1.0, 2.5}) {
    const Domain sq = Domain::unit_square(L);
    for (double s : {0.05, 0.3, 0.8 * L})
      CHECK(boundary_overlap_F(sq, s) == doctest::Approx(8.0 * L * s * s - 2.0 * s * s * s).epsilon(1e-8));
  }
  const Domain dk = Domain::disk({0.3, -0.2}, 1.0, 3.0);
  for (double s : {0.1, 1.0, 2.5, 5.0, 7.0}) {
    const double f = boundary_overlap_F(dk, s);
    CHECK(f == doctest::Approx(boundary_overlap_F_radial(dk, s)).epsilon(1e-7));
    CHECK(f <= 2.0 * kPi * s * area(dk) * (1.0 + 1e-12));
  }
  // beyond the diameter every direction exits
  CHECK(boundary_overlap_F(dk, 7.0) == doctest::Approx(2.0 * kPi * 7.0 * area(dk)).epsilon(1e-9));

  // small-s behaviour: F(s) / s^2 -> 2 |boundary|
  const Domain hx = hexagon(4.0);
  const double r1 = boundary_overlap_F(hx, 1e-2) / 1e-4;
  const double r2 = boundary_overlap_F(hx, 5e-3) / 2.5e-5;
  const double extrapolated = 2.0 * r2 - r1;
  CHECK(extrapolated == doctest::Approx(2.0 * boundary_length(hx)).epsilon(1e-5));

  double prev = boundary_overlap_F(hx, 1.0);
  for (double s = 1.001; s < 1.01; s += 0.001) {
    const double v = boundary_overlap_F(hx, s);
    CHECK(std::abs(v - prev) < 0.1);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(boundary_overlap_F(hx, 0.0), DomainError);
  CHECK_THROWS_AS(boundary_overlap_F(hx, -1.0), DomainError);
}

TEST_CASE("exclusion measure: direct, flux and overlap forms") {
  const Domain hx = hexagon(2.0);
  const Domain dk = Domain::disk({0, 0}, 1.0, 2.0);
  for (const Domain* d : {&hx, &dk}) {
    for (double s : {0.1, 0.9, 2.0}) {
      for (double th : {0.0, 0.4, 2.0}) {
        const Point2 v{std::cos(th), std::sin(th)};
        const double direct = exclusion_measure_direct(*d, s, v);
        CHECK(direct == doctest::Approx(area(*d) - translated_overlap_area(*d, {s * v.x, s * v.y})).epsilon(1e-6));
        CHECK(exclusion_measure_flux(*d, s, v) == doctest::Approx(direct).epsilon(1e-3));
      }
    }
  }
}

TEST_CASE("quadrature grid") {
  const auto sq = quadrature_grid(Domain::unit_square(10.0), 1.0);
  REQUIRE(sq.size() == 100);
  for (const auto& q : sq) CHECK(q.w == doctest::Approx(1.0));

  const Domain dk = Domain::disk({0, 0}, 1.0);
  double total = 0.0;
  for (const auto& q : quadrature_grid(dk, 0.02)) total += q.w;
  CHECK(total == doctest::Approx(kPi).epsilon(1e-3 / kPi));

  const Domain hx = hexagon(3.0);
  // boundary-cell error is O(h)
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    double s = 0.0;
    for (const auto& q : quadrature_grid(hx, h)) {
      CHECK(contains(hx, q.x));
      s += q.w;
    }
    CHECK(std::abs(s - area(hx)) <= 0.02 * h * boundary_length(hx));
  }

  CHECK_THROWS_AS(quadrature_grid(dk, 1e-3, 1000), ResourceError);
  CHECK_THROWS_AS(quadrature_grid(dk, 0.0), DomainError);
  CHECK_THROWS_AS(quadrature_grid(Domain::strip(1.0, 0.0, INFINITY), 0.1), DomainError);

  const auto g1 = quadrature_grid(hx, 0.05, kDefaultGridCap, 1);
  const auto g4 = quadrature_grid(hx, 0.05, kDefaultGridCap, 4);
  REQUIRE(g1.size() == g4.size());
  bool same = true;
  for (std::size_t i = 0; i < g1.size(); ++i)
    same = same && g1[i].x.x == g4[i].x.x && g1[i].x.y == g4[i].x.y && g1[i].w == g4[i].w;
  CHECK(same);
}

#include "landau_ee/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "landau_ee/errors.hpp"
#include "landau_ee/parallel.hpp"
#include "landau_ee/quadrature.hpp"

namespace landau_ee {

namespace {

constexpr double kPi = std::numbers::pi;

Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double norm(Point2 a) { return std::hypot(a.x, a.y); }

double signed_area(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto orient = [](Point2 p, Point2 q, Point2 r) {
    double v = cross(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  auto on_seg = [](Point2 p, Point2 q, Point2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_seg(a, b, c)) return true;
  if (o2 == 0 && on_seg(a, b, d)) return true;
  if (o3 == 0 && on_seg(c, d, a)) return true;
  if (o4 == 0 && on_seg(c, d, b)) return true;
  return false;
}

double dist_to_segment(Point2 p, Point2 a, Point2 b) {
  Point2 r = b - a;
  double len2 = dot(r, r);
  double t = len2 > 0 ? std::clamp(dot(p - a, r) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * r));
}

double poly_tolerance(const std::vector<Point2>& v) {
  double m = 1.0;
  for (const auto& p : v) m = std::max({m, std::abs(p.x), std::abs(p.y)});
  return 1e-12 * m;
}

enum class Where { Inside, Outside, Boundary };

// Classification of p against a polygon; on the boundary `edge` receives the edge index.
Where classify(Point2 p, const std::vector<Point2>& v, double tol, std::size_t* edge = nullptr) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (dist_to_segment(p, v[i], v[(i + 1) % n]) <= tol) {
      if (edge) *edge = i;
      return Where::Boundary;
    }
  }
  bool in = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      double xc = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < xc) in = !in;
    }
  }
  return in ? Where::Inside : Where::Outside;
}

// Parameter intervals of the segment a->b lying inside the polygon. With
// `coincident`, pieces running along an equally oriented polygon edge count too.
std::vector<std::pair<double, double>> clip_segment(Point2 a, Point2 b, const std::vector<Point2>& v,
                                                    double tol, bool coincident) {
  const Point2 r = b - a;
  const double rlen = norm(r);
  std::vector<double> ts{0.0, 1.0};
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point2 c = v[i], d = v[(i + 1) % n], q = d - c;
    double denom = cross(r, q);
    if (std::abs(denom) > 1e-14 * rlen * norm(q)) {
      double t = cross(c - a, q) / denom;
      double u = cross(c - a, r) / denom;
      if (t > 0.0 && t < 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12) ts.push_back(t);
    } else if (std::abs(cross(c - a, r)) <= tol * rlen) {
      for (Point2 e : {c, d}) {
        double t = dot(e - a, r) / (rlen * rlen);
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    double t0 = ts[k], t1 = ts[k + 1];
    if (t1 - t0 <= 1e-15) continue;
    Point2 m = a + (0.5 * (t0 + t1)) * r;
    std::size_t e = 0;
    Where w = classify(m, v, tol, &e);
    bool take = w == Where::Inside;
    if (w == Where::Boundary && coincident) {
      Point2 q = v[(e + 1) % n] - v[e];
      take = std::abs(cross(r, q)) <= 1e-12 * rlen * norm(q) && dot(r, q) > 0;
    }
    if (take) {
      if (!out.empty() && out.back().second == t0) out.back().second = t1;
      else out.emplace_back(t0, t1);
    }
  }
  return out;
}

// Area of the intersection of two simple counterclockwise polygons by
// integrating x dy - y dx over the boundary pieces of each inside the other.
double intersection_area(const std::vector<Point2>& p, const std::vector<Point2>& q, double tol) {
  double twice = 0.0;
  auto sweep = [&](const std::vector<Point2>& src, const std::vector<Point2>& other, bool coincident) {
    const std::size_t n = src.size();
    for (std::size_t i = 0; i < n; ++i) {
      Point2 a = src[i], b = src[(i + 1) % n];
      for (auto [t0, t1] : clip_segment(a, b, other, tol, coincident)) {
        Point2 s = a + t0 * (b - a), e = a + t1 * (b - a);
        twice += cross(s, e);
      }
    }
  };
  sweep(p, q, true);
  sweep(q, p, false);
  return 0.5 * twice;
}

double lens_area(double R, double s) {
  if (s >= 2.0 * R) return 0.0;
  return 2.0 * R * R * std::acos(s / (2.0 * R)) - 0.5 * s * std::sqrt(4.0 * R * R - s * s);
}

}  // namespace

Domain Domain::disk(Point2 center, double radius, double L) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("disk radius must be positive");
  if (!(L > 0.0)) throw DomainError("scale L must be positive");
  return Domain(Disk{center, radius}, L);
}

Domain Domain::polygon(std::vector<Point2> v, double L) {
  if (!(L > 0.0)) throw DomainError("scale L must be positive");
  const std::size_t n = v.size();
  if (n < 3) throw DomainError("polygon needs at least 3 vertices");
  for (const auto& p : v)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("polygon vertex not finite");
  const double tol = poly_tolerance(v);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (norm(v[i] - v[j]) <= tol) throw DomainError("polygon has repeated vertices");
  for (std::size_t i = 0; i < n; ++i) {
    Point2 e1 = v[i] - v[(i + n - 1) % n], e2 = v[(i + 1) % n] - v[i];
    if (std::abs(cross(e1, e2)) <= 1e-12 * norm(e1) * norm(e2))
      throw DomainError("polygon has collinear consecutive vertices");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_touch(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        throw DomainError("polygon is not simple");
    }
  }
  if (signed_area(v) < 0) std::reverse(v.begin(), v.end());
  return Domain(Polygon{std::move(v)}, L);
}

Domain Domain::unit_square(double L) { return polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, L); }

Domain Domain::strip(double a, double b, double c, double L) {
  if (!(a > 0.0) || !(b >= 0.0) || !(c > b)) throw DomainError("strip needs a > 0 and 0 <= b < c");
  if (!(L > 0.0)) throw DomainError("scale L must be positive");
  return Domain(HalfPlaneStrip{a, b, c}, L);
}

Domain Domain::with_scale(double L) const {
  if (!(L > 0.0)) throw DomainError("scale L must be positive");
  return Domain(shape_, L);
}

std::string Domain::id() const {
  if (std::holds_alternative<Disk>(shape_)) return "disk";
  if (const auto* p = std::get_if<Polygon>(&shape_)) return "polygon" + std::to_string(p->vertices.size());
  return "strip";
}

std::vector<Point2> scaled_vertices(const Domain& d) {
  const auto* p = std::get_if<Polygon>(&d.shape());
  if (!p) throw DomainError("scaled_vertices: not a polygon");
  std::vector<Point2> out;
  out.reserve(p->vertices.size());
  for (const auto& v : p->vertices) out.push_back(d.scale() * v);
  return out;
}

double boundary_length(const Domain& d) {
  if (const auto* c = std::get_if<Disk>(&d.shape())) return 2.0 * kPi * c->radius * d.scale();
  if (const auto* p = std::get_if<Polygon>(&d.shape())) {
    double s = 0.0;
    const auto& v = p->vertices;
    for (std::size_t i = 0; i < v.size(); ++i) s += norm(v[(i + 1) % v.size()] - v[i]);
    return s * d.scale();
  }
  throw DomainError("boundary_length: strip is unbounded");
}

double area(const Domain& d) {
  const double L2 = d.scale() * d.scale();
  if (const auto* c = std::get_if<Disk>(&d.shape())) return kPi * c->radius * c->radius * L2;
  if (const auto* p = std::get_if<Polygon>(&d.shape())) return signed_area(p->vertices) * L2;
  throw DomainError("area: strip is unbounded");
}

bool contains(const Domain& d, Point2 x) {
  const double L = d.scale();
  if (const auto* c = std::get_if<Disk>(&d.shape())) {
    double R = c->radius * L;
    Point2 z = x - L * c->center;
    return dot(z, z) < R * R;
  }
  if (const auto* p = std::get_if<Polygon>(&d.shape())) {
    Point2 y = (1.0 / L) * x;
    return classify(y, p->vertices, 1e-14) == Where::Inside;
  }
  const auto& s = std::get<HalfPlaneStrip>(d.shape());
  return x.x >= 0.0 && x.x < s.a * L && x.y > -s.c * L && x.y < -s.b * L;
}

double diameter(const Domain& d) {
  if (const auto* c = std::get_if<Disk>(&d.shape())) return 2.0 * c->radius * d.scale();
  if (const auto* p = std::get_if<Polygon>(&d.shape())) {
    double m = 0.0;
    for (const auto& a : p->vertices)
      for (const auto& b : p->vertices) m = std::max(m, norm(a - b));
    return m * d.scale();
  }
  throw DomainError("diameter: strip is unbounded");
}

double translated_overlap_area(const Domain& d, Point2 v) {
  if (const auto* c = std::get_if<Disk>(&d.shape())) return lens_area(c->radius * d.scale(), norm(v));
  if (std::get_if<Polygon>(&d.shape())) {
    std::vector<Point2> p = scaled_vertices(d);
    // Work relative to the first vertex to keep the cross products small.
    Point2 o = p[0];
    for (auto& q : p) q = q - o;
    std::vector<Point2> shifted(p);
    for (auto& q : shifted) q = q - v;
    return std::max(0.0, intersection_area(p, shifted, poly_tolerance(p)));
  }
  throw DomainError("translated_overlap_area: strip is unbounded");
}

double boundary_overlap_F(const Domain& d, double s) {
  if (!d.bounded()) throw DomainError("boundary_overlap_F: strip is unbounded");
  if (!(s > 0.0)) throw DomainError("boundary_overlap_F: s must be positive");
  const double A = area(d);
  if (std::holds_alternative<Disk>(d.shape())) return 2.0 * kPi * s * (A - translated_overlap_area(d, {s, 0.0}));

  // Polygon: the overlap area is piecewise smooth in the direction angle with
  // kinks at the edge directions; integrate adaptively between them.
  const auto& v = std::get<Polygon>(d.shape()).vertices;
  std::vector<double> cuts{0.0, 2.0 * kPi};
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point2 e = v[(i + 1) % v.size()] - v[i];
    double a = std::atan2(e.y, e.x);
    for (double c : {a, a + kPi}) {
      double m = std::fmod(c + 4.0 * kPi, 2.0 * kPi);
      if (m > 1e-12 && m < 2.0 * kPi - 1e-12) cuts.push_back(m);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto g = [&](double th) { return A - translated_overlap_area(d, {s * std::cos(th), s * std::sin(th)}); };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] < 1e-12) continue;
    total += integrate_adaptive(g, cuts[k], cuts[k + 1], 1e-13 * A, 1e-11, 30).value;
  }
  return s * total;
}

double boundary_overlap_F_radial(const Domain& d, double s) {
  const auto* c = std::get_if<Disk>(&d.shape());
  if (!c) throw DomainError("boundary_overlap_F_radial: disk only");
  if (!(s > 0.0)) throw DomainError("boundary_overlap_F_radial: s must be positive");
  const double R = c->radius * d.scale();
  // Angular measure of directions leaving the disk from radius r.
  auto exit_arc = [R, s](double r) {
    if (r == 0.0) return s >= R ? 2.0 * kPi : 0.0;
    double cth = (R * R - r * r - s * s) / (2.0 * r * s);
    if (cth >= 1.0) return 0.0;
    if (cth <= -1.0) return 2.0 * kPi;
    return 2.0 * std::acos(cth);
  };
  auto integrand = [&](double r) { return 2.0 * kPi * r * exit_arc(r); };
  const double split = std::abs(R - s);
  double total = 0.0;
  if (split < R) {
    total += integrate_adaptive(integrand, 0.0, split, 1e-14 * R * R, 1e-12).value;
    total += integrate_adaptive(integrand, split, R, 1e-14 * R * R, 1e-12).value;
  } else {
    total += integrate_adaptive(integrand, 0.0, R, 1e-14 * R * R, 1e-12).value;
  }
  return s * total;
}

double exclusion_measure_direct(const Domain& d, double s, Point2 v) {
  return area(d) - translated_overlap_area(d, s * v);
}

double exclusion_measure_flux(const Domain& d, double s, Point2 v) {
  if (const auto* c = std::get_if<Disk>(&d.shape())) {
    const double R = c->radius * d.scale();
    // Boundary points with n.v > t/(2R) keep y - t v inside the disk.
    auto per_t = [R](double t) {
      double q = t / (2.0 * R);
      return q >= 1.0 ? 0.0 : 2.0 * R * std::sqrt(1.0 - q * q);
    };
    return integrate_adaptive(per_t, 0.0, std::min(s, 2.0 * R), 1e-14, 1e-12).value;
  }
  if (std::get_if<Polygon>(&d.shape())) {
    const std::vector<Point2> p = scaled_vertices(d);
    const double tol = poly_tolerance(p);
    const std::size_t n = p.size();
    auto per_t = [&](double t) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        Point2 a = p[i], b = p[(i + 1) % n], e = b - a;
        double len = norm(e);
        Point2 normal{e.y / len, -e.x / len};
        double nv = dot(normal, v);
        if (nv == 0.0) continue;
        double inside = 0.0;
        for (auto [t0, t1] : clip_segment(a - t * v, b - t * v, p, tol, false)) inside += (t1 - t0) * len;
        sum += nv * inside;
      }
      return sum;
    };
    return integrate_adaptive(per_t, 0.0, s, 1e-13, 1e-11, 30).value;
  }
  throw DomainError("exclusion_measure_flux: strip is unbounded");
}

std::vector<QuadNode> quadrature_grid(const Domain& d, double h, std::size_t max_nodes, int threads) {
  if (!d.bounded()) throw DomainError("quadrature_grid: strip is unbounded");
  if (!(h > 0.0) || !(h < diameter(d))) throw DomainError("quadrature_grid: need 0 < h < diameter");
  const double L = d.scale();
  double xmin, xmax, ymin, ymax;
  if (const auto* c = std::get_if<Disk>(&d.shape())) {
    double R = c->radius * L;
    xmin = c->center.x * L - R;
    xmax = c->center.x * L + R;
    ymin = c->center.y * L - R;
    ymax = c->center.y * L + R;
  } else {
    auto v = scaled_vertices(d);
    xmin = xmax = v[0].x;
    ymin = ymax = v[0].y;
    for (const auto& p : v) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  const double expected = area(d) / (h * h);
  if (expected > static_cast<double>(max_nodes))
    throw ResourceError("quadrature_grid: about " + std::to_string(static_cast<long long>(expected)) +
                        " nodes exceed the cap of " + std::to_string(max_nodes));
  const auto nx = static_cast<std::size_t>(std::ceil((xmax - xmin) / h - 1e-9));
  const auto ny = static_cast<std::size_t>(std::ceil((ymax - ymin) / h - 1e-9));
  std::vector<std::vector<QuadNode>> rows(ny);
  parallel_for(ny, threads, [&](std::size_t j) {
    auto& row = rows[j];
    for (std::size_t i = 0; i < nx; ++i) {
      const double x0 = xmin + i * h, y0 = ymin + j * h;
      int count = 0;
      double sx = 0.0, sy = 0.0;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          Point2 q{x0 + (a + 0.5) * 0.25 * h, y0 + (b + 0.5) * 0.25 * h};
          if (contains(d, q)) {
            ++count;
            sx += q.x;
            sy += q.y;
          }
        }
      }
      if (count == 0) continue;
      Point2 node = count == 16 ? Point2{x0 + 0.5 * h, y0 + 0.5 * h} : Point2{sx / count, sy / count};
      row.push_back({node, h * h * count / 16.0});
    }
  });
  std::vector<QuadNode> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  if (out.size() > max_nodes) throw ResourceError("quadrature_grid: node cap exceeded");
  return out;
}

}  // namespace landau_ee

#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "landau_ee/landau_kernel.hpp"

namespace landau_ee {

struct Disk {
  Point2 center;
  double radius;
};

// Simple polygon, vertices stored counterclockwise.
struct Polygon {
  std::vector<Point2> vertices;
};

// [0,a) x (-c,-b); c may be +infinity.
struct HalfPlaneStrip {
  double a;
  double b;
  double c;
};

// Region Lambda together with the dilation L; all queries refer to L * Lambda.
class Domain {
 public:
  using Shape = std::variant<Disk, Polygon, HalfPlaneStrip>;

  static Domain disk(Point2 center, double radius, double L = 1.0);
  // Rejects repeated vertices, collinear triples and self-intersections;
  // clockwise input is reversed.
  static Domain polygon(std::vector<Point2> vertices, double L = 1.0);
  static Domain unit_square(double L = 1.0);
  static Domain strip(double a, double b, double c, double L = 1.0);

  const Shape& shape() const { return shape_; }
  double scale() const { return L_; }
  bool bounded() const { return !std::holds_alternative<HalfPlaneStrip>(shape_); }
  Domain with_scale(double L) const;
  // Short identifier used in scan records, e.g. "disk" or "polygon4".
  std::string id() const;

 private:
  Domain(Shape s, double L) : shape_(std::move(s)), L_(L) {}
  Shape shape_;
  double L_;
};

double boundary_length(const Domain& d);
double area(const Domain& d);
bool contains(const Domain& d, Point2 x);
double diameter(const Domain& d);

// Vertices of the scaled polygon L * Lambda (polygons only).
std::vector<Point2> scaled_vertices(const Domain& d);

// |L Lambda intersected with (L Lambda - v)|.
double translated_overlap_area(const Domain& d, Point2 v);

// F(s) = s * int_{L Lambda} dx int_0^{2 pi} dtheta 1[x + s e_theta outside L Lambda].
double boundary_overlap_F(const Domain& d, double s);
// Disk only: the same quantity by radial quadrature of the exit-arc length.
double boundary_overlap_F_radial(const Domain& d, double s);

// |{x in L Lambda : x + s v outside L Lambda}| for a unit vector v, directly
// and in boundary-flux form int_0^s dt int_{boundary} (n.v) 1[y - t v inside] dH(y).
double exclusion_measure_direct(const Domain& d, double s, Point2 v);
double exclusion_measure_flux(const Domain& d, double s, Point2 v);

struct QuadNode {
  Point2 x;
  double w;
};

inline constexpr std::size_t kDefaultGridCap = 4'000'000;

// Midpoint cells of side h over the bounding box, row-major; cells cut by the
// boundary get a 4x4 sub-sampled fractional weight and a centroid node.
std::vector<QuadNode> quadrature_grid(const Domain& d, double h, std::size_t max_nodes = kDefaultGridCap,
                                      int threads = 1);

}  // namespace landau_ee

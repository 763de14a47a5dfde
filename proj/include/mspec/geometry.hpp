#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mspec {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Interval {
  double a = 0.0;
  double b = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Axis-aligned rectangle [0, lx] x [0, ly].
struct Rectangle {
  double lx = 1.0;
  double ly = 1.0;
  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

// Disk of the given radius centred at the origin.
struct Disk {
  double radius = 1.0;
  friend bool operator==(const Disk&, const Disk&) = default;
};

// Simple polygon, stored counter-clockwise.
struct Polygon {
  std::vector<Point> vertices;
  friend bool operator==(const Polygon&, const Polygon&) = default;
};

// Validated analytic domain. Construction through the factories enforces
// the shape invariants; polygons given clockwise are re-oriented in place
// (vertex 0 stays first).
class DomainSpec {
 public:
  using Shape = std::variant<Interval, Rectangle, Disk, Polygon>;

  static DomainSpec interval(double a, double b);
  static DomainSpec rectangle(double lx, double ly);
  static DomainSpec disk(double radius);
  static DomainSpec polygon(std::vector<Point> vertices);
  static DomainSpec from_shape(Shape shape);

  const Shape& shape() const { return shape_; }
  int dimension() const;
  std::string type_name() const;

  // Strictly interior: farther than `margin` from the boundary.
  bool contains(Point p, double margin = 0.0) const;

  // Axis-aligned bounding box (y range is [0,0] for intervals).
  Point lower_corner() const;
  Point upper_corner() const;

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;

 private:
  explicit DomainSpec(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

double volume(const DomainSpec& spec);
double boundary_measure(const DomainSpec& spec);

double signed_area(std::span<const Point> vertices);
bool is_simple_polygon(std::span<const Point> vertices);

enum class GridKind { Lattice1D, Lattice2D, Radial };

// Interior nodes of a domain discretization. Lattice grids are stair-step
// subsets of h*Z^d (intervals anchored at a); the radial grid carries the
// rotationally symmetric reduction of a disk on nodes r_i = i*h.
struct Grid {
  DomainSpec domain;
  GridKind kind = GridKind::Lattice1D;
  double h = 0.0;
  std::vector<Point> nodes;
  std::vector<int> lattice_i;
  std::vector<int> lattice_j;
  std::vector<double> weights;

  // Dense lookup table over the lattice bounding box; -1 for exterior.
  int i_min = 0, i_max = -1, j_min = 0, j_max = -1;
  std::vector<int> lookup;

  std::size_t size() const { return nodes.size(); }
  int dimension() const { return kind == GridKind::Lattice2D ? 2 : 1; }
  // Index of the node at lattice coordinates (i, j), or -1.
  int index_of(int i, int j = 0) const;
};

using GridPtr = std::shared_ptr<const Grid>;

// Stair-step lattice of interior nodes, ordered lexicographically by (i, j).
GridPtr build_grid(const DomainSpec& spec, double h);

// Radial reduction of a disk: nodes r_i = i*h for i = 0..N-1 with R = N*h.
// Weights are the areas of the annular cells around each node.
GridPtr build_radial_grid(const DomainSpec& disk, double h);

// Vertices move along the angle-bisector outward normal by eps * f[k].
DomainSpec perturb_polygon(const DomainSpec& polygon, std::span<const double> f, double eps);

// Converts a rectangle to its polygon form; polygons pass through.
DomainSpec as_polygon(const DomainSpec& spec);

}  // namespace mspec

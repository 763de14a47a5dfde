#include "mspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "mspec/error.hpp"

namespace mspec {
namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

int orientation_sign(Point o, Point a, Point b) {
  const double c = cross(o, a, b);
  const double scale = std::max({std::fabs(a.x - o.x), std::fabs(a.y - o.y), std::fabs(b.x - o.x),
                                 std::fabs(b.y - o.y)});
  if (std::fabs(c) <= 1e-14 * scale * scale) return 0;
  return c > 0 ? 1 : -1;
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int d1 = orientation_sign(q1, q2, p1);
  const int d2 = orientation_sign(q1, q2, p2);
  const int d3 = orientation_sign(p1, p2, q1);
  const int d4 = orientation_sign(p1, p2, q2);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

bool point_in_polygon(Point p, const std::vector<Point>& v) {
  bool inside = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidDomain, message);
}

}  // namespace

double signed_area(std::span<const Point> v) {
  double twice = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

bool is_simple_polygon(std::span<const Point> v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (v[i] == v[j]) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a1 = v[i];
    const Point a2 = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point b1 = v[j];
      const Point b2 = v[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Neighbouring edges may only share their common vertex.
        const Point shared = (j == i + 1) ? a2 : a1;
        const Point other_a = (j == i + 1) ? a1 : a2;
        const Point other_b = (j == i + 1) ? b2 : b1;
        if (orientation_sign(shared, other_a, other_b) == 0) {
          const double dot = (other_a.x - shared.x) * (other_b.x - shared.x) +
                             (other_a.y - shared.y) * (other_b.y - shared.y);
          if (dot > 0) return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

DomainSpec DomainSpec::interval(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, "interval requires a < b");
  return DomainSpec(Interval{a, b});
}

DomainSpec DomainSpec::rectangle(double lx, double ly) {
  require(std::isfinite(lx) && std::isfinite(ly) && lx > 0 && ly > 0, "rectangle requires positive side lengths");
  return DomainSpec(Rectangle{lx, ly});
}

DomainSpec DomainSpec::disk(double radius) {
  require(std::isfinite(radius) && radius > 0, "disk requires a positive radius");
  return DomainSpec(Disk{radius});
}

DomainSpec DomainSpec::polygon(std::vector<Point> vertices) {
  require(vertices.size() >= 3, "polygon requires at least 3 vertices");
  for (const Point& p : vertices) require(std::isfinite(p.x) && std::isfinite(p.y), "polygon vertex is not finite");
  require(is_simple_polygon(vertices), "polygon is not simple");
  const double area = signed_area(vertices);
  require(area != 0.0, "polygon has zero area");
  if (area < 0) std::reverse(vertices.begin() + 1, vertices.end());
  return DomainSpec(Polygon{std::move(vertices)});
}

DomainSpec DomainSpec::from_shape(Shape shape) {
  return std::visit(
      [](auto&& s) -> DomainSpec {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) return interval(s.a, s.b);
        if constexpr (std::is_same_v<S, Rectangle>) return rectangle(s.lx, s.ly);
        if constexpr (std::is_same_v<S, Disk>) return disk(s.radius);
        if constexpr (std::is_same_v<S, Polygon>) return polygon(s.vertices);
      },
      std::move(shape));
}

int DomainSpec::dimension() const { return std::holds_alternative<Interval>(shape_) ? 1 : 2; }

std::string DomainSpec::type_name() const {
  switch (shape_.index()) {
    case 0: return "interval";
    case 1: return "rectangle";
    case 2: return "disk";
    default: return "polygon";
  }
}

bool DomainSpec::contains(Point p, double margin) const {
  if (const auto* s = std::get_if<Interval>(&shape_)) return p.x - s->a > margin && s->b - p.x > margin;
  if (const auto* s = std::get_if<Rectangle>(&shape_)) {
    return p.x > margin && s->lx - p.x > margin && p.y > margin && s->ly - p.y > margin;
  }
  if (const auto* s = std::get_if<Disk>(&shape_)) return s->radius - std::hypot(p.x, p.y) > margin;
  const auto& v = std::get<Polygon>(shape_).vertices;
  if (!point_in_polygon(p, v)) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (segment_distance(p, v[i], v[(i + 1) % v.size()]) <= margin) return false;
  }
  return true;
}

Point DomainSpec::lower_corner() const {
  if (const auto* s = std::get_if<Interval>(&shape_)) return {s->a, 0.0};
  if (std::holds_alternative<Rectangle>(shape_)) return {0.0, 0.0};
  if (const auto* s = std::get_if<Disk>(&shape_)) return {-s->radius, -s->radius};
  const auto& v = std::get<Polygon>(shape_).vertices;
  Point lo = v.front();
  for (const Point& p : v) lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
  return lo;
}

Point DomainSpec::upper_corner() const {
  if (const auto* s = std::get_if<Interval>(&shape_)) return {s->b, 0.0};
  if (const auto* s = std::get_if<Rectangle>(&shape_)) return {s->lx, s->ly};
  if (const auto* s = std::get_if<Disk>(&shape_)) return {s->radius, s->radius};
  const auto& v = std::get<Polygon>(shape_).vertices;
  Point hi = v.front();
  for (const Point& p : v) hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  return hi;
}

double volume(const DomainSpec& spec) {
  const auto& shape = spec.shape();
  if (const auto* s = std::get_if<Interval>(&shape)) return s->b - s->a;
  if (const auto* s = std::get_if<Rectangle>(&shape)) return s->lx * s->ly;
  if (const auto* s = std::get_if<Disk>(&shape)) return std::numbers::pi * s->radius * s->radius;
  return signed_area(std::get<Polygon>(shape).vertices);
}

double boundary_measure(const DomainSpec& spec) {
  const auto& shape = spec.shape();
  if (std::holds_alternative<Interval>(shape)) return 2.0;
  if (const auto* s = std::get_if<Rectangle>(&shape)) return 2.0 * (s->lx + s->ly);
  if (const auto* s = std::get_if<Disk>(&shape)) return 2.0 * std::numbers::pi * s->radius;
  const auto& v = std::get<Polygon>(shape).vertices;
  double perimeter = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    perimeter += std::hypot(b.x - a.x, b.y - a.y);
  }
  return perimeter;
}

int Grid::index_of(int i, int j) const {
  if (i < i_min || i > i_max || j < j_min || j > j_max) return -1;
  const std::size_t width = static_cast<std::size_t>(j_max - j_min + 1);
  return lookup[static_cast<std::size_t>(i - i_min) * width + static_cast<std::size_t>(j - j_min)];
}

namespace {

void finalize_lookup(Grid& g) {
  g.i_min = *std::min_element(g.lattice_i.begin(), g.lattice_i.end());
  g.i_max = *std::max_element(g.lattice_i.begin(), g.lattice_i.end());
  g.j_min = *std::min_element(g.lattice_j.begin(), g.lattice_j.end());
  g.j_max = *std::max_element(g.lattice_j.begin(), g.lattice_j.end());
  const std::size_t width = static_cast<std::size_t>(g.j_max - g.j_min + 1);
  g.lookup.assign(static_cast<std::size_t>(g.i_max - g.i_min + 1) * width, -1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.lookup[static_cast<std::size_t>(g.lattice_i[k] - g.i_min) * width +
             static_cast<std::size_t>(g.lattice_j[k] - g.j_min)] = static_cast<int>(k);
  }
}

void require_h(double h) {
  if (!(std::isfinite(h) && h > 0)) throw Error(ErrorCode::InvalidArgument, "mesh spacing h must be positive");
}

std::string too_coarse(double h, const char* axis, std::size_t count) {
  std::ostringstream os;
  os << "h=" << h << " leaves " << count << " interior node(s) along " << axis << " (need >= 3)";
  return os.str();
}

}  // namespace

GridPtr build_grid(const DomainSpec& spec, double h) {
  require_h(h);
  auto grid = std::make_shared<Grid>(Grid{spec, GridKind::Lattice1D, 0.0, {}, {}, {}, {}, 0, -1, 0, -1, {}});
  Grid& g = *grid;
  g.h = h;
  const double margin = 1e-9 * h;
  if (const auto* s = std::get_if<Interval>(&spec.shape())) {
    g.kind = GridKind::Lattice1D;
    for (int i = 1;; ++i) {
      const double x = s->a + i * h;
      if (!(s->b - x > margin)) break;
      g.nodes.push_back({x, 0.0});
      g.lattice_i.push_back(i);
      g.lattice_j.push_back(0);
    }
    if (g.size() < 3) throw Error(ErrorCode::GridTooCoarse, too_coarse(h, "x", g.size()));
    g.weights.assign(g.size(), h);
  } else {
    g.kind = GridKind::Lattice2D;
    const Point lo = spec.lower_corner();
    const Point hi = spec.upper_corner();
    const int i0 = static_cast<int>(std::floor(lo.x / h)) - 1;
    const int i1 = static_cast<int>(std::ceil(hi.x / h)) + 1;
    const int j0 = static_cast<int>(std::floor(lo.y / h)) - 1;
    const int j1 = static_cast<int>(std::ceil(hi.y / h)) + 1;
    std::set<int> is, js;
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        const Point p{i * h, j * h};
        if (!spec.contains(p, margin)) continue;
        g.nodes.push_back(p);
        g.lattice_i.push_back(i);
        g.lattice_j.push_back(j);
        is.insert(i);
        js.insert(j);
      }
    }
    if (is.size() < 3) throw Error(ErrorCode::GridTooCoarse, too_coarse(h, "x", is.size()));
    if (js.size() < 3) throw Error(ErrorCode::GridTooCoarse, too_coarse(h, "y", js.size()));
    g.weights.assign(g.size(), h * h);
  }
  finalize_lookup(g);
  return grid;
}

GridPtr build_radial_grid(const DomainSpec& spec, double h) {
  require_h(h);
  const auto* disk = std::get_if<Disk>(&spec.shape());
  if (disk == nullptr) throw Error(ErrorCode::Unsupported, "radial grids exist only for disks");
  const double ratio = disk->radius / h;
  const long n = std::lround(ratio);
  if (std::fabs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
    throw Error(ErrorCode::InvalidArgument, "radial grid spacing must divide the radius");
  }
  if (n < 3) throw Error(ErrorCode::GridTooCoarse, too_coarse(h, "r", static_cast<std::size_t>(n)));
  auto grid = std::make_shared<Grid>(Grid{spec, GridKind::Lattice1D, 0.0, {}, {}, {}, {}, 0, -1, 0, -1, {}});
  Grid& g = *grid;
  g.kind = GridKind::Radial;
  g.h = h;
  for (long i = 0; i < n; ++i) {
    const double r = static_cast<double>(i) * h;
    g.nodes.push_back({r, 0.0});
    g.lattice_i.push_back(static_cast<int>(i));
    g.lattice_j.push_back(0);
    g.weights.push_back(i == 0 ? std::numbers::pi * h * h / 4.0 : 2.0 * std::numbers::pi * r * h);
  }
  finalize_lookup(g);
  return grid;
}

DomainSpec perturb_polygon(const DomainSpec& spec, std::span<const double> f, double eps) {
  const auto* poly = std::get_if<Polygon>(&spec.shape());
  if (poly == nullptr) throw Error(ErrorCode::InvalidArgument, "perturb_polygon requires a polygon");
  const auto& v = poly->vertices;
  const std::size_t n = v.size();
  if (f.size() != n) throw Error(ErrorCode::InvalidArgument, "flow needs one value per vertex");
  if (!std::isfinite(eps)) throw Error(ErrorCode::InvalidArgument, "eps must be finite");
  if (eps == 0.0) return spec;

  auto edge_normal = [&](std::size_t i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    return Point{(b.y - a.y) / len, -(b.x - a.x) / len};
  };
  std::vector<Point> moved(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point before = edge_normal((k + n - 1) % n);
    const Point after = edge_normal(k);
    Point bis{before.x + after.x, before.y + after.y};
    const double len = std::hypot(bis.x, bis.y);
    if (len < 1e-12) throw Error(ErrorCode::InvalidDomain, "vertex normal undefined at a reflex cusp");
    bis = {bis.x / len, bis.y / len};
    moved[k] = {v[k].x + eps * f[k] * bis.x, v[k].y + eps * f[k] * bis.y};
  }
  if (!is_simple_polygon(moved) || !(signed_area(moved) > 0.0)) {
    throw Error(ErrorCode::InvalidDomain, "perturbed polygon is self-intersecting or inverted");
  }
  return DomainSpec::from_shape(Polygon{std::move(moved)});
}

DomainSpec as_polygon(const DomainSpec& spec) {
  if (std::holds_alternative<Polygon>(spec.shape())) return spec;
  if (const auto* r = std::get_if<Rectangle>(&spec.shape())) {
    return DomainSpec::polygon({{0, 0}, {r->lx, 0}, {r->lx, r->ly}, {0, r->ly}});
  }
  throw Error(ErrorCode::Unsupported, "only rectangles convert to polygons");
}

}  // namespace mspec

#include "spikelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spikelab {

namespace {

// Distance from a point to the ellipse curve x^2/a^2 + y^2/b^2 = 1, valid for
// queries inside or outside. Fold into the first quadrant; there the squared
// distance to the arc (a cos t, b sin t), t in [0, pi/2], has derivative
//   g(t) = (b^2 - a^2) cos t sin t + px a sin t - py b cos t,
// and g/(cos t sin t) is strictly increasing, so g has a unique interior root
// when px, py > 0. On-axis queries need the vertex-vs-foot split.
double ellipse_curve_distance(double a, double b, double px, double py) {
  px = std::abs(px);
  py = std::abs(py);
  if (py == 0.0) {
    if (a * a - b * b <= px * a) return std::abs(a - px);
    const double cx = a * a * px / (a * a - b * b);
    const double cy = b * std::sqrt(1.0 - (cx / a) * (cx / a));
    return std::hypot(cx - px, cy);
  }
  if (px == 0.0) {
    if (b * b - a * a <= py * b) return std::abs(b - py);
    const double cy = b * b * py / (b * b - a * a);
    const double cx = a * std::sqrt(1.0 - (cy / b) * (cy / b));
    return std::hypot(cx, cy - py);
  }
  auto g = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return (b * b - a * a) * c * s + px * a * s - py * b * c;
  };
  double lo = 0.0, hi = std::asin(1.0);  // pi/2
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  return std::hypot(a * std::cos(t) - px, b * std::sin(t) - py);
}

}  // namespace

DomainSpec DomainSpec::rectangle(double width, double height, Point c) {
  DomainSpec s;
  s.shape = Shape::rectangle;
  s.a = width;
  s.b = height;
  s.center = c;
  s.validate();
  return s;
}

DomainSpec DomainSpec::disk(double radius, Point c) {
  DomainSpec s;
  s.shape = Shape::disk;
  s.a = radius;
  s.b = radius;
  s.center = c;
  s.validate();
  return s;
}

DomainSpec DomainSpec::ellipse(double ax, double ay, Point c) {
  DomainSpec s;
  s.shape = Shape::ellipse;
  s.a = ax;
  s.b = ay;
  s.center = c;
  s.validate();
  return s;
}

void DomainSpec::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("domain: size parameter must be positive");
  if (shape != Shape::disk && (!(b > 0.0) || !std::isfinite(b)))
    throw ConfigError("domain: size parameter must be positive");
  if (!std::isfinite(center.x) || !std::isfinite(center.y))
    throw ConfigError("domain: center must be finite");
}

bool DomainSpec::contains(Point p) const {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  switch (shape) {
    case Shape::rectangle:
      return std::abs(dx) < 0.5 * a && std::abs(dy) < 0.5 * b;
    case Shape::disk:
      return dx * dx + dy * dy < a * a;
    case Shape::ellipse: {
      const double u = dx / a, v = dy / b;
      return u * u + v * v < 1.0;
    }
  }
  return false;
}

double DomainSpec::narrowest() const {
  switch (shape) {
    case Shape::rectangle:
      return std::min(a, b);
    case Shape::disk:
      return 2.0 * a;
    case Shape::ellipse:
      return 2.0 * std::min(a, b);
  }
  return 0.0;
}

double DomainSpec::diameter() const {
  switch (shape) {
    case Shape::rectangle:
      return std::hypot(a, b);
    case Shape::disk:
      return 2.0 * a;
    case Shape::ellipse:
      return 2.0 * std::max(a, b);
  }
  return 0.0;
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  switch (shape) {
    case Shape::rectangle:
      os << "rectangle(" << a << "," << b << ")";
      break;
    case Shape::disk:
      os << "disk(" << a << ")";
      break;
    case Shape::ellipse:
      os << "ellipse(" << a << "," << b << ")";
      break;
  }
  os << "@(" << center.x << "," << center.y << ")";
  return os.str();
}

double boundary_distance(const DomainSpec& spec, Point x) {
  const double dx = x.x - spec.center.x;
  const double dy = x.y - spec.center.y;
  switch (spec.shape) {
    case Shape::rectangle: {
      const double mx = 0.5 * spec.a - std::abs(dx);
      const double my = 0.5 * spec.b - std::abs(dy);
      return (mx > 0.0 && my > 0.0) ? std::min(mx, my) : 0.0;
    }
    case Shape::disk: {
      const double m = spec.a - std::hypot(dx, dy);
      return m > 0.0 ? m : 0.0;
    }
    case Shape::ellipse: {
      if (!spec.contains(x)) return 0.0;
      return ellipse_curve_distance(spec.a, spec.b, dx, dy);
    }
  }
  return 0.0;
}

double dist_to_domain(const DomainSpec& spec, Point x) {
  const double dx = x.x - spec.center.x;
  const double dy = x.y - spec.center.y;
  switch (spec.shape) {
    case Shape::rectangle: {
      const double ox = std::max(std::abs(dx) - 0.5 * spec.a, 0.0);
      const double oy = std::max(std::abs(dy) - 0.5 * spec.b, 0.0);
      return std::hypot(ox, oy);
    }
    case Shape::disk: {
      const double m = std::hypot(dx, dy) - spec.a;
      return m > 0.0 ? m : 0.0;
    }
    case Shape::ellipse: {
      const double u = dx / spec.a, v = dy / spec.b;
      if (u * u + v * v <= 1.0) return 0.0;
      return ellipse_curve_distance(spec.a, spec.b, dx, dy);
    }
  }
  return 0.0;
}

bool in_dilation(const DomainSpec& spec, Point x, double r) {
  if (r < 0.0) throw ConfigError("in_dilation: r must be nonnegative");
  const double d = dist_to_domain(spec, x);
  return d == 0.0 || d < r;
}

namespace {

// Fast-transform lengths: the DST sizes derived from the grid are kept
// 7-smooth, otherwise FFTW falls back to a quadratic generic path.
bool is_7smooth(int n) {
  for (int f : {2, 3, 5, 7})
    while (n % f == 0) n /= f;
  return n == 1;
}

}  // namespace

Grid Grid::cover(const DomainSpec& spec, double h, int margin_cells) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid: spacing h must be positive");
  if (margin_cells < 1) throw ConfigError("grid: margin must be at least one cell");
  double hx = 0.0, hy = 0.0;  // half extents of Omega
  switch (spec.shape) {
    case Shape::rectangle:
      hx = 0.5 * spec.a;
      hy = 0.5 * spec.b;
      break;
    case Shape::disk:
      hx = hy = spec.a;
      break;
    case Shape::ellipse:
      hx = spec.a;
      hy = spec.b;
      break;
  }
  // nx = 2m+1 and the 1-D transform length is nx+1 = 2(m+1); extra margin
  // rings are harmless, so m is bumped until m+1 factors over {2,3,5,7}.
  int mx = static_cast<int>(std::ceil(hx / h)) + margin_cells;
  int my = static_cast<int>(std::ceil(hy / h)) + margin_cells;
  while (!is_7smooth(mx + 1)) ++mx;
  while (!is_7smooth(my + 1)) ++my;
  Grid g;
  g.h = h;
  g.nx = 2 * mx + 1;
  g.ny = 2 * my + 1;
  g.origin = {spec.center.x - mx * h, spec.center.y - my * h};
  return g;
}

DomainMask build_mask(const DomainSpec& spec, const Grid& grid) {
  spec.validate();
  if (grid.nx < 3 || grid.ny < 3) throw GridError("build_mask: grid too small");
  DomainMask m;
  m.inside.assign(grid.size(), 0);
  m.bdist.assign(grid.size(), 0.0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Point p = grid.node(i, j);
      if (spec.contains(p)) {
        const std::size_t k = grid.index(i, j);
        m.inside[k] = 1;
        m.bdist[k] = boundary_distance(spec, p);
        ++m.inside_count;
        if (i == 0 || j == 0 || i == grid.nx - 1 || j == grid.ny - 1)
          throw GridError("build_mask: domain touches the grid border; enlarge the grid margin");
      }
    }
  }
  if (m.inside_count == 0) throw GridError("build_mask: no interior nodes");

  // Count inside nodes along the row and column through the domain center; the
  // smaller count must resolve the narrowest dimension with at least 8 nodes.
  const int ic = static_cast<int>(std::lround((spec.center.x - grid.origin.x) / grid.h));
  const int jc = static_cast<int>(std::lround((spec.center.y - grid.origin.y) / grid.h));
  int row = 0, col = 0;
  if (jc >= 0 && jc < grid.ny)
    for (int i = 0; i < grid.nx; ++i) row += m.inside[grid.index(i, jc)];
  if (ic >= 0 && ic < grid.nx)
    for (int j = 0; j < grid.ny; ++j) col += m.inside[grid.index(ic, j)];
  if (std::min(row, col) < 8)
    throw GridError("build_mask: grid too coarse, fewer than 8 interior nodes across the narrowest dimension");
  return m;
}

DomainPtr make_domain(const DomainSpec& spec, double h, int margin_cells) {
  return make_domain(spec, Grid::cover(spec, h, margin_cells));
}

DomainPtr make_domain(const DomainSpec& spec, const Grid& grid) {
  auto d = std::make_shared<Domain>();
  d->spec = spec;
  d->grid = grid;
  d->mask = build_mask(spec, grid);
  return d;
}

}  // namespace spikelab

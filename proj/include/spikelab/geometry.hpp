#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spikelab/errors.hpp"

namespace spikelab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double c, Point a) { return {c * a.x, c * a.y}; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return norm(a - b); }

enum class Shape { rectangle, disk, ellipse };

// A bounded planar domain with exact boundary-distance queries. Only shapes
// with closed-form (or robustly computable) closest-point distances are
// supported, so configuration-space predicates can trust the numbers.
struct DomainSpec {
  Shape shape = Shape::disk;
  double a = 1.0;  // rectangle: full width.  disk: radius.  ellipse: semi-axis along x.
  double b = 1.0;  // rectangle: full height. ellipse: semi-axis along y. unused for disk.
  Point center{0.0, 0.0};

  static DomainSpec rectangle(double width, double height, Point c = {});
  static DomainSpec disk(double radius, Point c = {});
  static DomainSpec ellipse(double ax, double ay, Point c = {});

  void validate() const;  // throws ConfigError if any size parameter is nonpositive

  // Open-set membership; points exactly on the boundary count as outside.
  bool contains(Point p) const;

  double narrowest() const;  // width of the narrowest dimension
  double diameter() const;
  std::string describe() const;
};

// dist(x, R^2 \ Omega); 0 whenever x lies outside Omega (or on the boundary).
double boundary_distance(const DomainSpec& spec, Point x);

// dist(x, Omega); 0 on the closure of Omega.
double dist_to_domain(const DomainSpec& spec, Point x);

// Membership in the open r-neighborhood of Omega: dist(x, Omega) < r, with the
// closure always included.
bool in_dilation(const DomainSpec& spec, Point x, double r);

// Uniform cell-centered grid. Node (i,j) sits at origin + (i*h, j*h); the cell
// around it extends h/2 in every direction, so the covered box strictly
// contains all nodes.
struct Grid {
  Point origin;
  double h = 1.0;
  int nx = 0;
  int ny = 0;

  Point node(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }

  // Smallest symmetric grid around spec.center whose bounding box contains the
  // closure of Omega with at least margin_cells rings of outside nodes. Node
  // counts are odd so the domain center is itself a node.
  static Grid cover(const DomainSpec& spec, double h, int margin_cells = 2);
};

struct DomainMask {
  std::vector<std::uint8_t> inside;  // per node
  std::vector<double> bdist;         // boundary_distance at inside nodes, 0 outside
  std::int64_t inside_count = 0;
};

// Exact geometric classification of every node plus boundary distances.
// Throws GridError if fewer than 8 interior nodes span the narrowest dimension
// of Omega, or if an inside node touches the grid border (stencils and edge
// sums assume a ring of outside nodes).
DomainMask build_mask(const DomainSpec& spec, const Grid& grid);

// Immutable bundle shared by every field living on this discretization.
struct Domain {
  DomainSpec spec;
  Grid grid;
  DomainMask mask;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_domain(const DomainSpec& spec, double h, int margin_cells = 2);
DomainPtr make_domain(const DomainSpec& spec, const Grid& grid);

}  // namespace spikelab

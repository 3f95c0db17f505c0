#include "spikelab/field.hpp"

#include <cmath>

namespace spikelab {

Field zeros_like(const Field& f) { return Field(f.dom); }

void enforce_mask(Field& f) {
  const auto& inside = f.dom->mask.inside;
  for (std::size_t k = 0; k < f.v.size(); ++k)
    if (!inside[k]) f.v[k] = 0.0;
}

bool same_discretization(const Field& a, const Field& b) {
  if (a.dom == b.dom) return true;
  const Grid &g = a.dom->grid, &h = b.dom->grid;
  return g.nx == h.nx && g.ny == h.ny && g.h == h.h && g.origin.x == h.origin.x &&
         g.origin.y == h.origin.y;
}

double integrate(const Field& f) {
  const auto& inside = f.dom->mask.inside;
  double s = 0.0;
  for (std::size_t k = 0; k < f.v.size(); ++k)
    if (inside[k]) s += f.v[k];
  return f.h() * f.h() * s;
}

double inner_l2(const Field& f, const Field& g) {
  const auto& inside = f.dom->mask.inside;
  double s = 0.0;
  for (std::size_t k = 0; k < f.v.size(); ++k)
    if (inside[k]) s += f.v[k] * g.v[k];
  return f.h() * f.h() * s;
}

double norm_l2(const Field& f) { return std::sqrt(inner_l2(f, f)); }

double dirichlet_inner(const Field& f, const Field& g) {
  // build_mask guarantees a ring of outside nodes, so every edge incident to an
  // inside node lies within the index range; edges between two outside nodes
  // contribute 0 and are skipped.
  const Grid& grid = f.dom->grid;
  const auto& inside = f.dom->mask.inside;
  double s = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i + 1 < grid.nx; ++i) {
      const std::size_t k = grid.index(i, j), r = k + 1;
      if (inside[k] || inside[r]) s += (f.v[r] - f.v[k]) * (g.v[r] - g.v[k]);
    }
  }
  for (int j = 0; j + 1 < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t k = grid.index(i, j), u = k + grid.nx;
      if (inside[k] || inside[u]) s += (f.v[u] - f.v[k]) * (g.v[u] - g.v[k]);
    }
  }
  return s;
}

double dirichlet_energy(const Field& f) { return dirichlet_inner(f, f); }

double eps_norm_sq(const Field& f, double eps) {
  if (!(eps > 0.0)) throw ConfigError("eps_norm_sq: eps must be positive");
  const double s = f.h() / eps;
  const auto& inside = f.dom->mask.inside;
  double mass = 0.0;
  for (std::size_t k = 0; k < f.v.size(); ++k)
    if (inside[k]) mass += f.v[k] * f.v[k];
  return dirichlet_energy(f) + s * s * mass;
}

double mixed_integral(const Field& f, const Field& g, double p, double eps) {
  if (!(p > 1.0)) throw ConfigError("mixed_integral: p must exceed 1");
  if (!(eps > 0.0)) throw ConfigError("mixed_integral: eps must be positive");
  const double s = f.h() / eps;
  const auto& inside = f.dom->mask.inside;
  double acc = 0.0;
  if (p == 2.0) {
    for (std::size_t k = 0; k < f.v.size(); ++k)
      if (inside[k]) {
        const double fg = f.v[k] * g.v[k];
        acc += fg * fg;
      }
  } else {
    for (std::size_t k = 0; k < f.v.size(); ++k)
      if (inside[k]) acc += pow_abs(f.v[k], p) * pow_abs(g.v[k], p);
  }
  return s * s * acc;
}

Field laplacian(const Field& f) {
  const Grid& grid = f.dom->grid;
  const auto& inside = f.dom->mask.inside;
  Field out(f.dom);
  const double ih2 = 1.0 / (grid.h * grid.h);
  for (int j = 1; j + 1 < grid.ny; ++j) {
    for (int i = 1; i + 1 < grid.nx; ++i) {
      const std::size_t k = grid.index(i, j);
      if (!inside[k]) continue;
      out.v[k] = (f.v[k + 1] + f.v[k - 1] + f.v[k + grid.nx] + f.v[k - grid.nx] - 4.0 * f.v[k]) * ih2;
    }
  }
  return out;
}

void axpy(Field& y, double a, const Field& x) {
  for (std::size_t k = 0; k < y.v.size(); ++k) y.v[k] += a * x.v[k];
}

void scale(Field& f, double c) {
  for (double& x : f.v) x *= c;
}

double bilinear_at(const Field& f, Point p) {
  const Grid& g = f.dom->grid;
  const double fx = (p.x - g.origin.x) / g.h;
  const double fy = (p.y - g.origin.y) / g.h;
  const int i0 = static_cast<int>(std::floor(fx));
  const int j0 = static_cast<int>(std::floor(fy));
  const double tx = fx - i0, ty = fy - j0;
  auto val = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) return 0.0;
    return f.v[g.index(i, j)];
  };
  return (1.0 - tx) * (1.0 - ty) * val(i0, j0) + tx * (1.0 - ty) * val(i0 + 1, j0) +
         (1.0 - tx) * ty * val(i0, j0 + 1) + tx * ty * val(i0 + 1, j0 + 1);
}

bool all_finite(const Field& f) {
  for (double x : f.v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace spikelab

#pragma once

#include <cmath>
#include <vector>

#include "spikelab/geometry.hpp"

namespace spikelab {

// Scalar grid function with hard zeros outside Omega (the discrete Dirichlet
// condition). Values at outside nodes stay exactly 0; every operation below
// preserves that.
struct Field {
  DomainPtr dom;
  std::vector<double> v;

  Field() = default;
  explicit Field(DomainPtr d) : dom(std::move(d)), v(dom->grid.size(), 0.0) {}

  double operator()(int i, int j) const { return v[dom->grid.index(i, j)]; }
  double& at(int i, int j) { return v[dom->grid.index(i, j)]; }
  bool inside(int i, int j) const { return dom->mask.inside[dom->grid.index(i, j)] != 0; }
  double h() const { return dom->grid.h; }
};

// |x|^p with 0 mapped to 0 (safe for non-integer p).
inline double pow_abs(double x, double p) {
  if (x == 0.0) return 0.0;
  if (p == 2.0) return x * x;
  return std::pow(std::abs(x), p);
}

// |x|^{p-2} x with 0 mapped to 0; the continuous extension for p > 1.
inline double dpow_abs(double x, double p) {
  if (x == 0.0) return 0.0;
  if (p == 2.0) return x;
  return std::pow(std::abs(x), p - 2.0) * x;
}

Field zeros_like(const Field& f);
void enforce_mask(Field& f);              // zero every outside node
bool same_discretization(const Field& a, const Field& b);

// Midpoint rule: h^2 * sum over inside nodes.
double integrate(const Field& f);

// h^2 * sum f*g over inside nodes.
double inner_l2(const Field& f, const Field& g);
double norm_l2(const Field& f);

// Sum over grid edges of squared forward differences (edges with at least one
// inside endpoint; outside values read as 0). Equals the integral of |grad f|^2
// under the midpoint rule: (df/h)^2 * h^2 per edge.
double dirichlet_energy(const Field& f);
double dirichlet_inner(const Field& f, const Field& g);

// eps^{-2} ( eps^2 * dirichlet_energy(f) + integrate(f^2) ), evaluated as
// dirichlet_energy(f) + (h/eps)^2 * sum f^2 so that the node-value-preserving
// rescale (h -> h/eps, eps -> 1) reproduces the identical floating-point sum.
double eps_norm_sq(const Field& f, double eps);

// eps^{-2} * integrate(|f|^p |g|^p), same (h/eps)^2 evaluation.
double mixed_integral(const Field& f, const Field& g, double p, double eps);

// 5-point stencil on inside nodes, 0 outside; neighbors outside read as 0.
Field laplacian(const Field& f);

// y += a*x
void axpy(Field& y, double a, const Field& x);
void scale(Field& f, double c);

// Bilinear interpolation of nodal values; 0 outside the grid.
double bilinear_at(const Field& f, Point p);

bool all_finite(const Field& f);

}  // namespace spikelab

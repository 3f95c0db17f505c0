#pragma once

#include <vector>

#include "spikelab/field.hpp"

namespace spikelab {

// Symmetric coupling matrix (beta_ij) with the competitive sign pattern
// beta_ii > 0, beta_ij < 0 for i != j, plus the common exponent p > 1.
struct CouplingMatrix {
  int ell = 2;
  double p = 2.0;
  std::vector<double> beta;  // row-major ell x ell

  double bval(int i, int j) const { return beta[static_cast<std::size_t>(i) * ell + j]; }

  // Config-level validation (requires ell >= 2). Internal scalar instances for
  // the limit and ball problems use allow_scalar = true.
  void validate(bool allow_scalar = false) const;

  static CouplingMatrix defaults(int ell = 2, double p = 2.0);  // beta_ii = 1 + i/2, beta_ij = -1
  static CouplingMatrix scalar(double beta, double p);
};

struct SignVector {
  std::vector<int> s;  // entries in {+1, -1}
  static SignVector ones(int ell) { return SignVector{std::vector<int>(static_cast<std::size_t>(ell), 1)}; }
};

// Discrete u = (u_1, ..., u_ell) together with the singular perturbation
// parameter. All components share one Domain.
struct SystemState {
  double eps = 1.0;
  std::vector<Field> comp;

  int ell() const { return static_cast<int>(comp.size()); }
  const DomainPtr& dom() const { return comp.front().dom; }
  void validate() const;  // shared domain, eps > 0, finite values
};

struct EnergyTerms {
  std::vector<double> a;  // a_i = ||u_i||_eps^2
  std::vector<double> b;  // b_ij = mixed_integral(u_i, u_j), row-major
  double bval(int i, int j, int ell) const { return b[static_cast<std::size_t>(i) * ell + j]; }
};

EnergyTerms energy_terms(const SystemState& state, const CouplingMatrix& cm);
double energy_from_terms(const EnergyTerms& t, const CouplingMatrix& cm);

// J_eps(u) = 1/2 sum_i ||u_i||_eps^2 - 1/(2p) sum_ij beta_ij mixed(u_i, u_j).
double energy(const SystemState& state, const CouplingMatrix& cm);

// Exact gradient of the discrete energy with respect to the node values of
// component i: for every perturbation v, d/dt energy(u + t e_i v)|_0 equals the
// plain nodal dot product of the returned field with v.
Field partial_gradient(const SystemState& state, const CouplingMatrix& cm, int i);

// Entry i: ||u_i||_eps^2 - sum_j beta_ij mixed(u_i, u_j); zero on the Nehari set.
std::vector<double> constraint_values(const SystemState& state, const CouplingMatrix& cm);

// max over i of the discrete L2 norm of -eps^2 lap u_i + u_i - sum_j beta_ij |u_j|^p |u_i|^{p-2} u_i.
double pde_residual_norm(const SystemState& state, const CouplingMatrix& cm);

SystemState apply_sign(const SystemState& state, const SignVector& s);

// Nodal dot product (no quadrature weight); pairs partial_gradient with
// perturbation fields.
double dot_nodes(const Field& a, const Field& b);

}  // namespace spikelab

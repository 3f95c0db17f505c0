#pragma once

#include <filesystem>
#include <vector>

#include "spikelab/nehari.hpp"

namespace spikelab {

// Least-energy profile of the scalar problem -eps^2 lap w + w = beta |w|^{2p-2} w
// on its domain (a ball, or a large box standing in for the whole plane).
struct GroundState {
  Field profile;
  double energy = 0.0;
  double mass = 0.0;  // integral of profile^2 (unweighted)
  double beta = 1.0;
  double p = 2.0;
  double eps = 1.0;
  DomainSpec domain;
  double grad_norm = 0.0;
  int iterations = 0;
};

struct ScalarSolveOptions {
  double grad_tol = 1e-8;  // relative to ||u||_eps
  int max_iter = 20000;
  std::vector<double> width_factors{0.5, 1.0, 2.0};  // Gaussian widths, in units of eps
  int cascade_cells = 160;  // grids wider than this start from a 2h solve
};

// Minimizes the scalar energy over its Nehari manifold by projected descent:
// Riesz-gradient step, then the closed-form reprojection
// t = (a / (beta b))^{1/(2p-2)}. Multistart over Gaussian widths, lowest energy
// kept. Throws SolveError with a short trace on nonconvergence.
GroundState solve_scalar(const DomainSpec& domain, const Grid& grid, double beta, double p,
                         double eps, const ScalarSolveOptions& opt = {});

// Independent check: integrates w'' + w'/rho - w + beta |w|^{2p-2} w = 0 with
// w'(0) = 0 by RK4, bisecting on w(0) for the decaying solution.
struct RadialOracleResult {
  std::vector<double> rho, w, dw;
  double w0 = 0.0;      // shooting parameter
  double energy = 0.0;  // J_infty by radial quadrature
  double mass = 0.0;    // 2 pi int w^2 rho drho
};
RadialOracleResult radial_shooting_oracle(double beta, double p, double rmax = 15.0,
                                          double tol = 1e-13);

// Translate a ball profile so its center lands on the target node nearest xi;
// pure index shift (grids must share h), so sums are preserved exactly.
Field place(const GroundState& gs, Point xi, const DomainPtr& target);

// Exact symmetry v_b = (b_old/b_new)^{1/(2p-2)} v_old of the scalar problem.
GroundState rescale_to_beta(const GroundState& gs, double beta_new);

// Write-once disk cache keyed by (shape, beta, p, eps, h).
class GroundStateCache {
 public:
  explicit GroundStateCache(std::filesystem::path dir);
  GroundState get_or_solve(const DomainSpec& domain, double h, double beta, double p, double eps,
                           const ScalarSolveOptions& opt = {});
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace spikelab

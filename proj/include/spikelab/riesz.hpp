#pragma once

#include <memory>

#include "spikelab/field.hpp"

namespace spikelab {

// Riesz representative of a nodal linear functional in the eps-weighted inner
// product: solves (graph-Laplacian + (h/eps)^2 I) G = g on the masked nodes,
// which makes G the steepest-descent direction in the same norm the energy is
// built from. Solved by CG preconditioned with the exact inverse of the same
// operator on the full grid box (fast diagonalization, DST-I via FFTW); the
// preconditioner differs from the masked operator only near the boundary, so
// iteration counts stay small and grid-independent.
//
// Instances hold FFTW plans and scratch buffers; not safe for concurrent use.
class RieszSolver {
 public:
  RieszSolver(DomainPtr dom, double eps);
  ~RieszSolver();
  RieszSolver(const RieszSolver&) = delete;
  RieszSolver& operator=(const RieszSolver&) = delete;

  // warm_start, when given, seeds CG with the previous representative.
  Field apply(const Field& g, const Field* warm_start = nullptr, double rel_tol = 1e-7) const;

  // The forward operator itself (masked graph Laplacian + (h/eps)^2 I).
  Field apply_forward(const Field& x) const;

  double eps() const { return eps_; }
  const DomainPtr& domain() const { return dom_; }
  int last_iterations() const { return last_iterations_; }

 private:
  struct Impl;
  DomainPtr dom_;
  double eps_;
  std::unique_ptr<Impl> impl_;
  mutable int last_iterations_ = 0;
};

}  // namespace spikelab

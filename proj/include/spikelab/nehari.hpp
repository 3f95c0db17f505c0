#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spikelab/system.hpp"

namespace spikelab {

// A state on the Nehari-type set together with the scaling that put it there.
struct NehariPoint {
  SystemState state;             // t .* u
  std::vector<double> t;         // applied componentwise scaling, all positive
  std::vector<double> residual;  // constraint_values of the scaled state
  EnergyTerms terms;             // a_i, b_ij of the scaled state
  double energy = 0.0;
  int iterations = 0;            // accepted Newton steps
};

struct ProjectionFailure {
  ProjectionError::Kind kind = ProjectionError::Kind::not_in_u;
  std::string detail;
};

// Finds the positive scaling vector t with t.*u on the Nehari set: solves
//   t_i^2 a_i = sum_j beta_ij t_i^p t_j^p b_ij
// by damped Newton in sigma = log t, started from the decoupled closed form
// t_i = (a_i / (beta_ii b_ii))^{1/(2p-2)}. Residuals are normalized by
// max(1, t_i^2 a_i) and must drop below 1e-10; failure to converge within 200
// iterations, or any t_i leaving [1e-8, 1e8], reports not_in_u (the state has
// no positive Nehari multiple, which genuinely happens in the competitive
// regime).
std::optional<NehariPoint> try_project(const SystemState& state, const CouplingMatrix& cm,
                                       ProjectionFailure* why = nullptr);

// As try_project but throws ProjectionError on failure.
NehariPoint project(const SystemState& state, const CouplingMatrix& cm);

// Reduced functional: energy after projection.
double psi(const SystemState& state, const CouplingMatrix& cm);

// energy - (1/2 - 1/(2p)) * sum_i ||u_i||_eps^2; vanishes on the Nehari set.
double nehari_energy_identity(const NehariPoint& np, const CouplingMatrix& cm);

}  // namespace spikelab

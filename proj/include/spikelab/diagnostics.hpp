#pragma once

#include <vector>

#include "spikelab/groundstate.hpp"

namespace spikelab {

enum class SignClass { nonnegative, nonpositive, sign_changing, zero };
const char* to_string(SignClass s);

// Center of mass of f^2. On compactly supported grid functions this realizes
// the barycenter properties exactly: b(|f|) = b(f), integer-grid-shift
// equivariance, the symmetry center for grid-symmetric fields, and 1/c scaling
// under the node-value-preserving rescale h -> h/c.
Point barycenter(const Field& f);
std::vector<Point> barycenter_vec(const SystemState& state);

// nonnegative iff min f >= -delta_rel * max |f| (and symmetrically); zero iff f == 0.
SignClass sign_classify(const Field& f, double delta_rel = 1e-8);

// Unique representative of the Z-orbit: each component flipped so its integral
// is nonnegative. For sign-pure components this is the nonnegative member.
struct OrbitKey {
  SystemState canonical;
  SignVector signs;  // flips applied to reach the representative
};
OrbitKey canonicalize(const SystemState& state);

// Normalized L2 distance between canonical representatives:
//   sum_i ||a_i - b_i|| / (sum_i (||a_i|| + ||b_i||) / 2).
// Two states count as the same solution below 1e-3.
double orbit_distance(const SystemState& a, const SystemState& b);

// Per component: resample u_i(b_i + eps z) onto the reference profile's grid
// (bilinear), compare in the discrete H1 norm against the whole-space profile,
// relative to the profile norm. Throws WindowError when the window captures
// less than 99% of the component's mass.
std::vector<double> concentration_error(const SystemState& state,
                                        const std::vector<GroundState>& whole_space);

// min over i != j of |b(u_i) - b(u_j)| / eps.
double separation_ratio(const SystemState& state);

// eps^{-2} integral of beta_ii |u_i|^{2p} over the ball of radius eps around
// b(u_i): the rescaled unit-ball mass near the concentration point. Reported,
// never asserted against a bound.
std::vector<double> local_mass(const SystemState& state, const CouplingMatrix& cm);

}  // namespace spikelab

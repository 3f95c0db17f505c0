#pragma once

#include <cstdint>
#include <vector>

#include "spikelab/groundstate.hpp"

namespace spikelab {

// An ell-tuple of candidate concentration points with separation radius r.
struct Configuration {
  std::vector<Point> points;
  double r = 0.0;
};

// Membership in F_{ell,r}: every point further than r from the complement of
// Omega and pairwise distances above 2r, all strictly. r = 0 reduces to
// pairwise-distinct points inside Omega.
bool in_F(const Configuration& cfg, const DomainSpec& spec);

// Membership in E_{ell,r}: point i needs boundary distance and distances to
// all earlier points strictly above 2^{ell-i+1} r (1-based i). Not symmetric
// under permutations. E_{ell,0} coincides with F_{ell,0}.
bool in_E(const Configuration& cfg, const DomainSpec& spec);

// Rejection sampling of configurations in F_{ell,r}, followed by a few rounds
// of margin-improving resampling that spread the points apart. Deterministic
// for a fixed seed; throws SamplingError after 1e6 rejected candidate tuples
// for any single configuration.
std::vector<Configuration> sample_F(const DomainSpec& spec, int ell, double r, int count,
                                    std::uint64_t rng_seed);

// Largest r from the schedule {0.3, 0.2, 0.15, 0.1, 0.05} * diam(Omega) for
// which sampling succeeds.
double auto_radius(const DomainSpec& spec, int ell, std::uint64_t rng_seed);

// The seeding map: component i is the ball profile gs[i] translated to point i,
// zero-extended. Disjoint supports put the result on the Nehari set up to the
// scalar solver tolerances.
SystemState i_eps(const Configuration& cfg, const std::vector<GroundState>& gs,
                  const DomainPtr& target);

}  // namespace spikelab

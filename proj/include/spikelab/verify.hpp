#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spikelab {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Self-contained property suites over small instances: coupling validation,
// discrete calculus identities, gradient finite-difference checks, Nehari
// projection laws, symmetry invariances, barycenter properties, rescaling
// identities, and the configuration-space containments.
std::vector<SuiteResult> run_verification_suites(std::uint64_t rng_seed = 2024);

}  // namespace spikelab

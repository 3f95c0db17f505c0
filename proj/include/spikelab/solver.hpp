#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikelab/diagnostics.hpp"
#include "spikelab/seeding.hpp"

namespace spikelab {

enum class Outcome { converged, maxiter, left_u };
const char* to_string(Outcome o);

struct SolveConfig {
  double grad_tol = 1e-8;   // relative to ||u||_eps
  int max_iter = 20000;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double init_step = 1.0;
  double dedup_tol = 1e-3;
  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct SolveReport {
  SystemState state;
  double energy = 0.0;
  double grad_norm = 0.0;
  double pde_residual = 0.0;
  int iterations = 0;
  Outcome outcome = Outcome::maxiter;
  std::vector<SignClass> signs;
  std::vector<Point> barycenters;
  double separation = 0.0;               // separation_ratio, ell >= 2
  std::vector<double> concentration;     // filled when reference profiles are available
  std::vector<double> local_masses;
  std::vector<TraceRow> trace;
};

// Projected descent of the reduced functional: step every component along the
// negative Riesz gradient, reproject onto the Nehari set, accept by Armijo.
// Reprojection failure at every trial step reports left_u. The seed must
// project successfully.
SolveReport descend(const SystemState& seed, const CouplingMatrix& cm, const SolveConfig& cfg);

struct SolutionSet {
  struct Entry {
    OrbitKey key;
    SolveReport report;
    Configuration seed_config;
    int seed_index = 0;
  };
  std::vector<Entry> orbits;  // energy-sorted, pairwise orbit_distance >= dedup
  int seeds_attempted = 0;
  int seeds_converged = 0;
  std::vector<std::string> failures;  // one note per non-converged seed
  double r = 0.0;
  std::vector<double> c_infty;  // per-component whole-space energies (oracle)
};

struct MultistartParams {
  DomainSpec spec;
  double h = 0.0;
  CouplingMatrix cm;
  double eps = 0.05;
  double r = 0.0;  // <= 0 means auto
  int n_seeds = 20;
  std::uint64_t rng_seed = 1;
  SolveConfig cfg;
  int jobs = 1;
  GroundStateCache* cache = nullptr;  // required
  bool with_concentration = true;     // solve whole-space references and fill metrics
};

// Seeds n_seeds configurations, descends each, canonicalizes and deduplicates.
// Per-seed failures are collected, not fatal; throws SolveError only when no
// seed converges.
SolutionSet multistart(const MultistartParams& params);

// Energy-sorted greedy dedup; exposed for tests.
void dedup_by_orbit(std::vector<SolutionSet::Entry>& entries, double tol);

struct StageResult {
  double eps = 0.0;
  double h = 0.0;
  SolveReport report;
  double energy_gap = 0.0;  // |energy - sum_i c_infty_i|
};

struct ContinuationParams {
  DomainSpec spec;
  CouplingMatrix cm;
  std::vector<double> eps_schedule;  // strictly decreasing
  double r = 0.0;                    // <= 0 means auto
  double resolution = 8.0;           // eps/h at the first stage
  double refine_growth = 0.5;        // eps/h grows like eps^{-refine_growth}
  int n_seeds = 5;                   // first-stage multistart size
  std::uint64_t rng_seed = 1;
  SolveConfig cfg;
  int jobs = 1;
  GroundStateCache* cache = nullptr;
};

// Warm-started descent along a decreasing eps schedule; each stage transfers
// the previous solution by bilinear interpolation onto the refined grid and
// reprojects. Throws SolveError naming the stage when the branch is lost.
std::vector<StageResult> continuation(const ContinuationParams& params);

// Whole-space reference profiles (box surrogate) per component, via the cache.
std::vector<GroundState> whole_space_references(const CouplingMatrix& cm, GroundStateCache& cache);

// Per-component limit energies from the radial shooting oracle (independent of
// the grid discretization).
std::vector<double> oracle_limit_energies(const CouplingMatrix& cm);

// Reference box for the whole-space surrogate: side 24, h = 24/512, eps = 1.
inline constexpr double kWholeSpaceBox = 24.0;
inline constexpr int kWholeSpaceCells = 512;

}  // namespace spikelab

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spikelab/solver.hpp"

namespace spikelab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCacheEnvVar = "NEHARI_CACHE_DIR";

// One experiment description: parsed from a JSON document, overridable by CLI
// flags, validated against every module precondition before compute starts.
struct RunConfig {
  DomainSpec domain = DomainSpec::disk(1.0);
  CouplingMatrix cm = CouplingMatrix::defaults();
  double eps = 0.05;
  std::vector<double> eps_schedule;  // for continuation
  double r = 0.0;                    // 0 means auto
  double h = 0.0;                    // 0 means eps / resolution
  double resolution = 8.0;           // minimum eps/h
  double refine_growth = 0.5;
  int n_seeds = 20;
  std::uint64_t rng_seed = 1;
  std::string output_dir = "runs/out";
  int jobs = 1;
  SolveConfig solve;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  double grid_h() const { return h > 0.0 ? h : eps / resolution; }
  void validate_for_solve() const;
  void validate_for_continue() const;
};

std::filesystem::path resolve_cache_dir(const std::string& flag_value);

// Run artifacts. summary.csv is byte-stable for identical configurations.
void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const RunConfig& cfg, const nlohmann::json& results);
void write_summary_csv(const std::filesystem::path& path, const SolutionSet& set, int ell);
void write_trace_csv(const std::filesystem::path& path, const SolutionSet& set);

// Field binaries and PGM heatmaps per orbit component; returns the heatmap
// color scales (vmax per written image) keyed by filename.
nlohmann::json write_solution_artifacts(const std::filesystem::path& dir, const SolutionSet& set);

nlohmann::json stage_results_json(const std::vector<StageResult>& stages, double c_sum);

}  // namespace spikelab

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikelab/config.hpp"
#include "spikelab/io.hpp"
#include "spikelab/verify.hpp"

namespace fs = std::filesystem;
using namespace spikelab;

namespace {

struct CommonFlags {
  std::string config_file;
  std::string output_dir;
  std::string cache_dir;
  int jobs = 0;
};

RunConfig load_config(const CommonFlags& common) {
  RunConfig cfg;
  if (!common.config_file.empty()) cfg = RunConfig::from_file(common.config_file);
  if (!common.output_dir.empty()) cfg.output_dir = common.output_dir;
  if (common.jobs > 0) cfg.jobs = common.jobs;
  return cfg;
}

int cmd_groundstate(const CommonFlags& common, std::vector<double> betas, double p, double eps,
                    double box, double ball, double h, bool skip_oracle) {
  GroundStateCache cache(resolve_cache_dir(common.cache_dir));
  const bool use_ball = ball > 0.0;
  const DomainSpec domain = use_ball ? DomainSpec::disk(ball) : DomainSpec::rectangle(box, box);
  if (h <= 0.0) h = use_ball ? eps / 8.0 : box / 512.0;

  std::printf("# domain %s, p=%g, eps=%g, h=%g (cache: %s)\n", domain.describe().c_str(), p, eps, h,
              cache.dir().string().c_str());
  std::printf("%-10s %-16s %-16s %-16s %-16s %-10s\n", "beta", "energy", "mass", "oracle_energy",
              "oracle_mass", "rel_err");
  for (double beta : betas) {
    const GroundState gs = cache.get_or_solve(domain, h, beta, p, eps);
    if (skip_oracle) {
      std::printf("%-10g %-16.10g %-16.10g %-16s %-16s %-10s\n", beta, gs.energy, gs.mass, "-", "-", "-");
      continue;
    }
    const RadialOracleResult oracle = radial_shooting_oracle(beta, p);
    // grid energies at eps are compared against the eps-independent limit value
    const double rel = std::abs(gs.energy - oracle.energy) / std::abs(oracle.energy);
    std::printf("%-10g %-16.10g %-16.10g %-16.10g %-16.10g %-10.3g\n", beta, gs.energy, gs.mass,
                oracle.energy, oracle.mass, rel);
  }
  return 0;
}

int cmd_solve(const CommonFlags& common, const RunConfig& cfg) {
  cfg.validate_for_solve();
  GroundStateCache cache(resolve_cache_dir(common.cache_dir));
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);

  MultistartParams params;
  params.spec = cfg.domain;
  params.h = cfg.grid_h();
  params.cm = cfg.cm;
  params.eps = cfg.eps;
  params.r = cfg.r;
  params.n_seeds = cfg.n_seeds;
  params.rng_seed = cfg.rng_seed;
  params.cfg = cfg.solve;
  params.jobs = cfg.jobs;
  params.cache = &cache;

  const SolutionSet set = multistart(params);

  write_summary_csv(out / "summary.csv", set, cfg.cm.ell);
  write_trace_csv(out / "trace.csv", set);
  const nlohmann::json scales = write_solution_artifacts(out / "solutions", set);
  nlohmann::json results;
  results["r"] = set.r;
  results["orbits"] = set.orbits.size();
  results["seeds_attempted"] = set.seeds_attempted;
  results["seeds_converged"] = set.seeds_converged;
  results["failures"] = set.failures;
  results["c_infty"] = set.c_infty;
  results["heatmap_scales"] = scales;
  write_manifest(out / "manifest.json", "solve", cfg, results);

  std::printf("r = %s, seeds converged: %d/%d\n", format_double(set.r).c_str(), set.seeds_converged,
              set.seeds_attempted);
  std::printf("distinct Z-orbits: %zu (expected >= %d: %s)\n", set.orbits.size(), cfg.cm.ell,
              set.orbits.size() >= static_cast<std::size_t>(cfg.cm.ell) ? "yes" : "NO");
  if (set.orbits.size() < static_cast<std::size_t>(cfg.cm.ell))
    std::fprintf(stderr, "warning: fewer distinct orbits than components\n");
  for (std::size_t k = 0; k < set.orbits.size(); ++k) {
    const SolveReport& rep = set.orbits[k].report;
    std::printf("  orbit %zu: energy %.10g, grad %.3g, signs", k, rep.energy, rep.grad_norm);
    for (auto s : rep.signs) std::printf(" %s", to_string(s));
    std::printf("\n");
  }
  std::printf("artifacts written to %s\n", out.string().c_str());
  return 0;
}

int cmd_continue(const CommonFlags& common, const RunConfig& cfg) {
  cfg.validate_for_continue();
  GroundStateCache cache(resolve_cache_dir(common.cache_dir));
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);

  ContinuationParams params;
  params.spec = cfg.domain;
  params.cm = cfg.cm;
  params.eps_schedule = cfg.eps_schedule;
  params.r = cfg.r;
  params.resolution = cfg.resolution;
  params.refine_growth = cfg.refine_growth;
  params.n_seeds = cfg.n_seeds;
  params.rng_seed = cfg.rng_seed;
  params.cfg = cfg.solve;
  params.jobs = cfg.jobs;
  params.cache = &cache;

  const std::vector<StageResult> stages = continuation(params);
  double c_sum = 0.0;
  for (double c : oracle_limit_energies(cfg.cm)) c_sum += c;

  std::ofstream os(out / "stages.csv");
  os << "stage,eps,h,energy,energy_gap,separation_ratio";
  for (int i = 0; i < cfg.cm.ell; ++i) os << ",conc_" << i;
  os << "\n";
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const StageResult& st = stages[k];
    os << k << "," << format_double(st.eps) << "," << format_double(st.h) << ","
       << format_double(st.report.energy) << "," << format_double(st.energy_gap) << ","
       << format_double(st.report.separation);
    for (double ce : st.report.concentration) os << "," << format_double(ce);
    os << "\n";
  }
  os.close();
  write_manifest(out / "manifest.json", "continue", cfg, stage_results_json(stages, c_sum));

  std::printf("%-8s %-10s %-12s %-14s %-14s %-14s\n", "stage", "eps", "energy", "gap_to_limit",
              "separation", "max_conc_err");
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const StageResult& st = stages[k];
    double cmax = 0.0;
    for (double ce : st.report.concentration) cmax = std::max(cmax, ce);
    std::printf("%-8zu %-10g %-12.8g %-14.4g %-14.6g %-14.4g\n", k, st.eps, st.report.energy,
                st.energy_gap, st.report.separation, cmax);
  }
  std::printf("artifacts written to %s\n", out.string().c_str());
  return 0;
}

int cmd_verify(std::uint64_t rng_seed) {
  const std::vector<SuiteResult> results = run_verification_suites(rng_seed);
  bool all = true;
  for (const SuiteResult& r : results) {
    std::printf("%-4s %s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.empty() ? "" : " -- ", r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spikelab: multi-spike solutions of weakly coupled singularly perturbed elliptic systems"};
  app.require_subcommand(1);

  CommonFlags common;
  app.add_option("--cache", common.cache_dir, "ground-state cache directory (overrides " +
                                                  std::string(kCacheEnvVar) + ")");

  auto* gs = app.add_subcommand("groundstate", "solve scalar ground states and compare to the radial oracle");
  std::vector<double> gs_betas{1.0};
  double gs_p = 2.0, gs_eps = 1.0, gs_box = 24.0, gs_ball = 0.0, gs_h = 0.0;
  bool gs_no_oracle = false;
  gs->add_option("--beta", gs_betas, "self-coupling values");
  gs->add_option("--p", gs_p, "nonlinearity exponent");
  gs->add_option("--eps", gs_eps, "perturbation parameter");
  gs->add_option("--box", gs_box, "whole-plane surrogate box side");
  gs->add_option("--ball", gs_ball, "solve on the ball of this radius instead of a box");
  gs->add_option("--h", gs_h, "grid spacing (default: box/512 or eps/8)");
  gs->add_flag("--no-oracle", gs_no_oracle, "skip the radial shooting comparison");

  auto* solve = app.add_subcommand("solve", "multistart search for distinct solution orbits");
  auto* cont = app.add_subcommand("continue", "continuation along a decreasing eps schedule");
  for (CLI::App* sub : {solve, cont}) {
    sub->add_option("--config", common.config_file, "JSON run configuration");
    sub->add_option("--out", common.output_dir, "output directory");
    sub->add_option("--jobs", common.jobs, "parallel seed workers");
  }
  int ov_ell = 0, ov_seeds = 0;
  double ov_eps = 0.0, ov_r = -1.0, ov_h = 0.0;
  std::uint64_t ov_rng = 0;
  std::vector<double> ov_schedule;
  solve->add_option("--ell", ov_ell, "number of components (default coupling matrix)");
  solve->add_option("--eps", ov_eps, "perturbation parameter");
  solve->add_option("--r", ov_r, "separation radius (omit for auto)");
  solve->add_option("--h", ov_h, "grid spacing (default eps/8)");
  solve->add_option("--seeds", ov_seeds, "number of seed configurations");
  solve->add_option("--rng-seed", ov_rng, "seed for the sampling stream");
  cont->add_option("--schedule", ov_schedule, "decreasing eps values");
  cont->add_option("--r", ov_r, "separation radius (omit for auto)");
  cont->add_option("--seeds", ov_seeds, "first-stage seed count");
  cont->add_option("--rng-seed", ov_rng, "seed for the sampling stream");

  auto* verify = app.add_subcommand("verify", "run the module property suites");
  std::uint64_t verify_seed = 2024;
  verify->add_option("--rng-seed", verify_seed, "seed for the randomized suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gs->parsed()) return cmd_groundstate(common, gs_betas, gs_p, gs_eps, gs_box, gs_ball, gs_h, gs_no_oracle);
    if (verify->parsed()) return cmd_verify(verify_seed);

    RunConfig cfg = load_config(common);
    if (solve->parsed()) {
      if (ov_ell > 0 && ov_ell != cfg.cm.ell) cfg.cm = CouplingMatrix::defaults(ov_ell, cfg.cm.p);
      if (ov_eps > 0.0) cfg.eps = ov_eps;
      if (ov_r >= 0.0) cfg.r = ov_r;
      if (ov_h > 0.0) cfg.h = ov_h;
      if (ov_seeds > 0) cfg.n_seeds = ov_seeds;
      if (ov_rng != 0) cfg.rng_seed = ov_rng;
      return cmd_solve(common, cfg);
    }
    if (cont->parsed()) {
      if (!ov_schedule.empty()) cfg.eps_schedule = ov_schedule;
      if (ov_r >= 0.0) cfg.r = ov_r;
      if (ov_seeds > 0) cfg.n_seeds = ov_seeds;
      if (ov_rng != 0) cfg.rng_seed = ov_rng;
      return cmd_continue(common, cfg);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

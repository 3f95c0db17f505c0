#include "spikelab/config.hpp"

#include <cstdlib>
#include <fstream>

#include "spikelab/io.hpp"

namespace spikelab {

namespace {

using nlohmann::json;

double get_num(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number())
    throw ConfigError(std::string(field) + ": expected a number");
  return j[field].get<double>();
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  if (j.contains("domain")) {
    const json& d = j["domain"];
    const std::string shape = d.value("shape", "disk");
    std::vector<double> params = d.value("params", std::vector<double>{1.0});
    Point c{0.0, 0.0};
    if (d.contains("center")) {
      if (!d["center"].is_array() || d["center"].size() != 2)
        throw ConfigError("domain.center: expected [x, y]");
      c = {d["center"][0].get<double>(), d["center"][1].get<double>()};
    }
    if (shape == "disk") {
      if (params.size() != 1) throw ConfigError("domain.params: disk expects [radius]");
      cfg.domain = DomainSpec::disk(params[0], c);
    } else if (shape == "rectangle") {
      if (params.size() != 2) throw ConfigError("domain.params: rectangle expects [width, height]");
      cfg.domain = DomainSpec::rectangle(params[0], params[1], c);
    } else if (shape == "ellipse") {
      if (params.size() != 2) throw ConfigError("domain.params: ellipse expects [a, b]");
      cfg.domain = DomainSpec::ellipse(params[0], params[1], c);
    } else {
      throw ConfigError("domain.shape: unknown shape '" + shape + "'");
    }
  }
  if (j.contains("coupling")) {
    const json& cj = j["coupling"];
    CouplingMatrix cm;
    cm.ell = cj.contains("ell") ? cj["ell"].get<int>() : 2;
    cm.p = cj.contains("p") ? get_num(cj, "p") : 2.0;
    if (cj.contains("beta")) {
      if (!cj["beta"].is_array()) throw ConfigError("coupling.beta: expected a row-major list");
      cm.beta = cj["beta"].get<std::vector<double>>();
    } else {
      cm = CouplingMatrix::defaults(cm.ell, cm.p);
    }
    cm.validate();
    cfg.cm = cm;
  }
  if (j.contains("eps")) cfg.eps = get_num(j, "eps");
  if (j.contains("eps_schedule")) {
    if (!j["eps_schedule"].is_array()) throw ConfigError("eps_schedule: expected a list");
    cfg.eps_schedule = j["eps_schedule"].get<std::vector<double>>();
  }
  if (j.contains("r")) {
    if (j["r"].is_string()) {
      if (j["r"].get<std::string>() != "auto") throw ConfigError("r: expected a number or \"auto\"");
      cfg.r = 0.0;
    } else {
      cfg.r = get_num(j, "r");
    }
  }
  if (j.contains("h")) cfg.h = get_num(j, "h");
  if (j.contains("resolution")) cfg.resolution = get_num(j, "resolution");
  if (j.contains("refine_growth")) cfg.refine_growth = get_num(j, "refine_growth");
  if (j.contains("n_seeds")) cfg.n_seeds = j["n_seeds"].get<int>();
  if (j.contains("rng_seed")) cfg.rng_seed = j["rng_seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (s.contains("grad_tol")) cfg.solve.grad_tol = get_num(s, "grad_tol");
    if (s.contains("max_iter")) cfg.solve.max_iter = s["max_iter"].get<int>();
    if (s.contains("armijo_c")) cfg.solve.armijo_c = get_num(s, "armijo_c");
    if (s.contains("backtrack")) cfg.solve.backtrack = get_num(s, "backtrack");
    if (s.contains("init_step")) cfg.solve.init_step = get_num(s, "init_step");
    if (s.contains("dedup_tol")) cfg.solve.dedup_tol = get_num(s, "dedup_tol");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  json d;
  switch (domain.shape) {
    case Shape::disk:
      d = {{"shape", "disk"}, {"params", {domain.a}}};
      break;
    case Shape::rectangle:
      d = {{"shape", "rectangle"}, {"params", {domain.a, domain.b}}};
      break;
    case Shape::ellipse:
      d = {{"shape", "ellipse"}, {"params", {domain.a, domain.b}}};
      break;
  }
  d["center"] = {domain.center.x, domain.center.y};
  json j;
  j["domain"] = d;
  j["coupling"] = {{"ell", cm.ell}, {"p", cm.p}, {"beta", cm.beta}};
  j["eps"] = eps;
  if (!eps_schedule.empty()) j["eps_schedule"] = eps_schedule;
  if (r > 0.0)
    j["r"] = r;
  else
    j["r"] = "auto";
  j["h"] = grid_h();
  j["resolution"] = resolution;
  j["refine_growth"] = refine_growth;
  j["n_seeds"] = n_seeds;
  j["rng_seed"] = rng_seed;
  j["output_dir"] = output_dir;
  j["jobs"] = jobs;
  j["solver"] = {{"grad_tol", solve.grad_tol},   {"max_iter", solve.max_iter},
                 {"armijo_c", solve.armijo_c},   {"backtrack", solve.backtrack},
                 {"init_step", solve.init_step}, {"dedup_tol", solve.dedup_tol}};
  return j;
}

void RunConfig::validate_for_solve() const {
  domain.validate();
  cm.validate();
  solve.validate();
  if (!(eps > 0.0)) throw ConfigError("eps: must be positive");
  if (n_seeds < 1) throw ConfigError("n_seeds: must be at least 1");
  if (jobs < 1) throw ConfigError("jobs: must be at least 1");
  if (r < 0.0) throw ConfigError("r: must be nonnegative (or \"auto\")");
  const double hh = grid_h();
  if (!(hh > 0.0)) throw ConfigError("h: must be positive");
  if (eps / hh < 8.0 - 1e-9)
    throw ConfigError("h: eps/h = " + format_double(eps / hh) +
                      " but a spike of width eps must span at least 8 cells");
}

void RunConfig::validate_for_continue() const {
  domain.validate();
  cm.validate();
  solve.validate();
  if (eps_schedule.empty()) throw ConfigError("eps_schedule: required for continuation");
  for (double e : eps_schedule)
    if (!(e > 0.0)) throw ConfigError("eps_schedule: entries must be positive");
  for (std::size_t k = 0; k + 1 < eps_schedule.size(); ++k)
    if (!(eps_schedule[k] > eps_schedule[k + 1]))
      throw ConfigError("eps_schedule: must be strictly decreasing");
  if (!(resolution >= 8.0)) throw ConfigError("resolution: eps/h must be at least 8");
  if (refine_growth < 0.0) throw ConfigError("refine_growth: must be nonnegative");
  if (n_seeds < 1) throw ConfigError("n_seeds: must be at least 1");
  if (jobs < 1) throw ConfigError("jobs: must be at least 1");
}

std::filesystem::path resolve_cache_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv(kCacheEnvVar); env && *env) return env;
  return ".nehari-cache";
}

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const RunConfig& cfg, const nlohmann::json& results) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = cfg.to_json();
  j["results"] = results;
  std::ofstream os(path);
  if (!os) throw Error("cannot write manifest: " + path.string());
  os << j.dump(2) << "\n";
}

void write_summary_csv(const std::filesystem::path& path, const SolutionSet& set, int ell) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write summary: " + path.string());
  os << "orbit,seed_index,energy,grad_norm,pde_residual,iterations,outcome,separation_ratio";
  for (int i = 0; i < ell; ++i)
    os << ",sign_" << i << ",bary_x_" << i << ",bary_y_" << i << ",conc_" << i << ",theta_" << i
       << ",seed_x_" << i << ",seed_y_" << i;
  os << "\n";
  for (std::size_t k = 0; k < set.orbits.size(); ++k) {
    const auto& e = set.orbits[k];
    const SolveReport& rep = e.report;
    os << k << "," << e.seed_index << "," << format_double(rep.energy) << ","
       << format_double(rep.grad_norm) << "," << format_double(rep.pde_residual) << ","
       << rep.iterations << "," << to_string(rep.outcome) << "," << format_double(rep.separation);
    for (int i = 0; i < ell; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      os << "," << to_string(rep.signs[si]) << "," << format_double(rep.barycenters[si].x) << ","
         << format_double(rep.barycenters[si].y) << ","
         << (rep.concentration.empty() ? "" : format_double(rep.concentration[si])) << ","
         << format_double(rep.local_masses[si]) << "," << format_double(e.seed_config.points[si].x)
         << "," << format_double(e.seed_config.points[si].y);
    }
    os << "\n";
  }
}

void write_trace_csv(const std::filesystem::path& path, const SolutionSet& set) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write trace: " + path.string());
  os << "orbit,iter,energy,grad_norm,step\n";
  for (std::size_t k = 0; k < set.orbits.size(); ++k)
    for (const TraceRow& row : set.orbits[k].report.trace)
      os << k << "," << row.iter << "," << format_double(row.energy) << ","
         << format_double(row.grad_norm) << "," << format_double(row.step) << "\n";
}

nlohmann::json write_solution_artifacts(const std::filesystem::path& dir, const SolutionSet& set) {
  std::filesystem::create_directories(dir);
  nlohmann::json scales = nlohmann::json::object();
  for (std::size_t k = 0; k < set.orbits.size(); ++k) {
    const SystemState& st = set.orbits[k].report.state;
    for (int i = 0; i < st.ell(); ++i) {
      const std::string stem = "orbit" + std::to_string(k) + "_comp" + std::to_string(i);
      write_field_binary(dir / (stem + ".bin"), st.comp[static_cast<std::size_t>(i)]);
      const double vmax = write_field_pgm(dir / (stem + ".pgm"), st.comp[static_cast<std::size_t>(i)]);
      scales[stem + ".pgm"] = vmax;
    }
  }
  return scales;
}

nlohmann::json stage_results_json(const std::vector<StageResult>& stages, double c_sum) {
  nlohmann::json arr = nlohmann::json::array();
  for (const StageResult& st : stages) {
    nlohmann::json j;
    j["eps"] = st.eps;
    j["h"] = st.h;
    j["energy"] = st.report.energy;
    j["energy_gap"] = st.energy_gap;
    j["separation_ratio"] = st.report.separation;
    j["concentration"] = st.report.concentration;
    j["iterations"] = st.report.iterations;
    j["outcome"] = to_string(st.report.outcome);
    arr.push_back(std::move(j));
  }
  nlohmann::json out;
  out["stages"] = std::move(arr);
  out["c_infty_sum"] = c_sum;
  return out;
}

}  // namespace spikelab

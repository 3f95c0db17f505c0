#include "spikelab/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "spikelab/riesz.hpp"

namespace spikelab {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::converged:
      return "converged";
    case Outcome::maxiter:
      return "maxiter";
    case Outcome::left_u:
      return "left_U";
  }
  return "?";
}

void SolveConfig::validate() const {
  if (!(grad_tol > 0.0)) throw ConfigError("solver.grad_tol must be positive");
  if (max_iter < 1) throw ConfigError("solver.max_iter must be at least 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("solver.armijo_c must be in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("solver.backtrack must be in (0,1)");
  if (!(init_step > 0.0)) throw ConfigError("solver.init_step must be positive");
  if (!(dedup_tol > 0.0)) throw ConfigError("solver.dedup_tol must be positive");
}

namespace {

void fill_diagnostics(SolveReport& rep, const CouplingMatrix& cm) {
  rep.signs.clear();
  for (const Field& f : rep.state.comp) rep.signs.push_back(sign_classify(f));
  rep.barycenters = barycenter_vec(rep.state);
  if (rep.state.ell() >= 2) rep.separation = separation_ratio(rep.state);
  rep.local_masses = local_mass(rep.state, cm);
  rep.pde_residual = pde_residual_norm(rep.state, cm);
}

}  // namespace

namespace {

// Stacked multi-component vector helpers for the quasi-Newton recursion.
using Stack = std::vector<Field>;

double stack_dot(const Stack& a, const Stack& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += dot_nodes(a[i], b[i]);
  return s;
}

void stack_axpy(Stack& y, double c, const Stack& x) {
  for (std::size_t i = 0; i < y.size(); ++i) axpy(y[i], c, x[i]);
}

// Curvature pair for L-BFGS in the Riesz inner product. With primal iterates
// and dual gradients, every metric product in the two-loop reduces to a plain
// nodal dot: <s,q>_M = (Ms).q and <Y,r>_M = (MY).r = y.r.
struct CurvaturePair {
  Stack s;   // state difference (primal)
  Stack y;   // gradient difference (dual)
  Stack Y;   // M^{-1} y (primal)
  Stack Ms;  // forward operator applied to s (dual)
  double sy = 0.0;  // <s,Y>_M = s.y
  double yY = 0.0;  // <Y,Y>_M = y.Y
};

}  // namespace

SolveReport descend(const SystemState& seed, const CouplingMatrix& cm, const SolveConfig& cfg) {
  cfg.validate();
  seed.validate();
  const int ell = seed.ell();
  RieszSolver riesz(seed.dom(), seed.eps);

  NehariPoint np = project(seed, cm);  // throws if the seed is outside U_eps

  SolveReport rep;
  rep.outcome = Outcome::maxiter;

  // The descent direction is built by limited-memory BFGS over the Riesz
  // (eps-metric) gradient. Spike translations form nearly-flat curved valleys
  // whose curvature is an exponentially small tail interaction; a memory of
  // recent curvature pairs lets the iteration walk them in a bounded number of
  // steps where the plain preconditioned gradient creeps. Fixed points are
  // unchanged; every trial is reprojected and safeguarded by a nonmonotone
  // Armijo test.
  constexpr std::size_t kMemory = 10;
  std::vector<CurvaturePair> pairs;
  Stack grad(static_cast<std::size_t>(ell));
  Stack G(static_cast<std::size_t>(ell));
  Stack prev_state, prev_grad;
  std::vector<double> recent_energies{np.energy};

  int iter = 0;
  for (;; ++iter) {
    double gn2 = 0.0, a_sum = 0.0;
    for (int i = 0; i < ell; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      grad[si] = partial_gradient(np.state, cm, i);
      G[si] = riesz.apply(grad[si], iter > 0 ? &G[si] : nullptr);
      gn2 += dot_nodes(grad[si], G[si]);
      a_sum += np.terms.a[si];
    }
    const double grad_norm = std::sqrt(std::max(gn2, 0.0));
    rep.grad_norm = grad_norm;
    rep.trace.push_back({iter, np.energy, grad_norm, 0.0});

    if (grad_norm <= cfg.grad_tol * std::sqrt(a_sum)) {
      rep.outcome = Outcome::converged;
      break;
    }
    if (iter >= cfg.max_iter) {
      rep.outcome = Outcome::maxiter;
      break;
    }

    // Curvature pair from the last accepted move.
    if (!prev_state.empty()) {
      CurvaturePair cp;
      cp.s = np.state.comp;
      for (int i = 0; i < ell; ++i) axpy(cp.s[static_cast<std::size_t>(i)], -1.0, prev_state[static_cast<std::size_t>(i)]);
      cp.y = grad;
      for (int i = 0; i < ell; ++i) axpy(cp.y[static_cast<std::size_t>(i)], -1.0, prev_grad[static_cast<std::size_t>(i)]);
      cp.sy = stack_dot(cp.s, cp.y);
      const double ss = stack_dot(cp.s, cp.s), yy = stack_dot(cp.y, cp.y);
      if (cp.sy > 1e-12 * std::sqrt(ss * yy)) {
        cp.Ms.reserve(static_cast<std::size_t>(ell));
        cp.Y.reserve(static_cast<std::size_t>(ell));
        for (int i = 0; i < ell; ++i) {
          cp.Ms.push_back(riesz.apply_forward(cp.s[static_cast<std::size_t>(i)]));
          cp.Y.push_back(riesz.apply(cp.y[static_cast<std::size_t>(i)]));
        }
        cp.yY = stack_dot(cp.y, cp.Y);
        pairs.push_back(std::move(cp));
        if (pairs.size() > kMemory) pairs.erase(pairs.begin());
      }
    }
    prev_state = np.state.comp;
    prev_grad = grad;

    // Two-loop recursion in the M-metric, H0 = gamma * M^{-1}.
    Stack d = G;
    std::vector<double> alpha(pairs.size(), 0.0);
    for (std::size_t k = pairs.size(); k-- > 0;) {
      const CurvaturePair& cp = pairs[k];
      alpha[k] = stack_dot(cp.Ms, d) / cp.sy;
      stack_axpy(d, -alpha[k], cp.Y);
    }
    if (!pairs.empty()) {
      const CurvaturePair& last = pairs.back();
      const double gamma = last.yY > 0.0 ? last.sy / last.yY : 1.0;
      for (Field& f : d) scale(f, gamma);
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const CurvaturePair& cp = pairs[k];
      const double beta = stack_dot(cp.y, d) / cp.sy;
      stack_axpy(d, alpha[k] - beta, cp.s);
    }
    double dg = stack_dot(d, grad);  // directional derivative along -d
    if (!(dg > 0.0)) {
      pairs.clear();
      d = G;
      dg = gn2;
    }

    // Allowance for the rounding floor of the energy evaluation: once the
    // Armijo decrease is unmeasurable in double precision, steps of the
    // contracting iteration are accepted as-is.
    const double slack = 4.0 * 2.220446049250313e-16 * (std::abs(np.energy) + a_sum);
    double e_ref = np.energy;
    for (double e : recent_energies) e_ref = std::max(e_ref, e);

    bool accepted = false;
    bool any_projection_ok = false;
    SystemState trial;
    trial.eps = np.state.eps;
    trial.comp.resize(static_cast<std::size_t>(ell));
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = cfg.init_step;
      for (int halvings = 0; halvings < 60 && !accepted; ++halvings) {
        for (int i = 0; i < ell; ++i) {
          trial.comp[static_cast<std::size_t>(i)] = np.state.comp[static_cast<std::size_t>(i)];
          axpy(trial.comp[static_cast<std::size_t>(i)], -step, d[static_cast<std::size_t>(i)]);
        }
        if (auto cand = try_project(trial, cm)) {
          any_projection_ok = true;
          if (cand->energy <= e_ref - cfg.armijo_c * step * dg + slack) {
            np = std::move(*cand);
            rep.trace.back().step = step;
            accepted = true;
          }
        }
        step *= cfg.backtrack;
      }
      if (!accepted && !pairs.empty()) {
        // quasi-Newton direction rejected; retry once with the plain gradient
        pairs.clear();
        d = G;
        dg = gn2;
      } else {
        break;
      }
    }
    if (!accepted) {
      rep.outcome = any_projection_ok ? Outcome::maxiter : Outcome::left_u;
      break;
    }
    recent_energies.push_back(np.energy);
    if (recent_energies.size() > 15) recent_energies.erase(recent_energies.begin());
  }

  rep.state = np.state;
  rep.energy = np.energy;
  rep.iterations = iter;
  fill_diagnostics(rep, cm);
  return rep;
}

void dedup_by_orbit(std::vector<SolutionSet::Entry>& entries, double tol) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    if (x.report.energy != y.report.energy) return x.report.energy < y.report.energy;
    return x.seed_index < y.seed_index;
  });
  std::vector<SolutionSet::Entry> kept;
  for (auto& e : entries) {
    bool duplicate = false;
    for (const auto& k : kept) {
      if (orbit_distance(e.key.canonical, k.key.canonical) < tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(std::move(e));
  }
  entries = std::move(kept);
}

std::vector<GroundState> whole_space_references(const CouplingMatrix& cm, GroundStateCache& cache) {
  const DomainSpec box = DomainSpec::rectangle(kWholeSpaceBox, kWholeSpaceBox);
  const double h = kWholeSpaceBox / kWholeSpaceCells;
  std::vector<GroundState> refs;
  refs.reserve(static_cast<std::size_t>(cm.ell));
  for (int i = 0; i < cm.ell; ++i)
    refs.push_back(cache.get_or_solve(box, h, cm.bval(i, i), cm.p, 1.0));
  return refs;
}

std::vector<double> oracle_limit_energies(const CouplingMatrix& cm) {
  // one oracle run per distinct self-coupling; the beta-law maps it exactly
  double e_unit = -1.0;
  std::vector<double> out(static_cast<std::size_t>(cm.ell));
  for (int i = 0; i < cm.ell; ++i) {
    if (e_unit < 0.0) e_unit = radial_shooting_oracle(1.0, cm.p).energy;
    out[static_cast<std::size_t>(i)] = e_unit * std::pow(cm.bval(i, i), -1.0 / (cm.p - 1.0));
  }
  return out;
}

SolutionSet multistart(const MultistartParams& params) {
  params.cm.validate(true);
  params.cfg.validate();
  if (!params.cache) throw ConfigError("multistart: a ground-state cache is required");
  if (!(params.h > 0.0)) throw ConfigError("multistart: grid spacing h must be positive");
  if (params.n_seeds < 1) throw ConfigError("multistart: need at least one seed");

  SolutionSet set;
  set.r = params.r > 0.0 ? params.r : auto_radius(params.spec, params.cm.ell, params.rng_seed);

  const DomainPtr dom = make_domain(params.spec, params.h);

  // One ball profile per component (distinct beta_ii give distinct profiles).
  const DomainSpec ball = DomainSpec::disk(set.r);
  std::vector<GroundState> ball_gs;
  for (int i = 0; i < params.cm.ell; ++i)
    ball_gs.push_back(params.cache->get_or_solve(ball, params.h, params.cm.bval(i, i), params.cm.p, params.eps));

  std::vector<GroundState> ws_refs;
  if (params.with_concentration) {
    ws_refs = whole_space_references(params.cm, *params.cache);
    set.c_infty = oracle_limit_energies(params.cm);
  }

  const std::vector<Configuration> configs =
      sample_F(params.spec, params.cm.ell, set.r, params.n_seeds, params.rng_seed);

  struct SeedResult {
    bool ok = false;
    SolveReport report;
    std::string failure;
  };
  std::vector<SeedResult> results(static_cast<std::size_t>(params.n_seeds));

  // Seeds are independent and internally single-threaded, so the results (and
  // everything derived from them) do not depend on the job count.
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= params.n_seeds) return;
      SeedResult& res = results[static_cast<std::size_t>(k)];
      try {
        SystemState seed = i_eps(configs[static_cast<std::size_t>(k)], ball_gs, dom);
        SolveReport rep = descend(seed, params.cm, params.cfg);
        if (rep.outcome == Outcome::converged) {
          if (!ws_refs.empty()) rep.concentration = concentration_error(rep.state, ws_refs);
          res.report = std::move(rep);
          res.ok = true;
        } else {
          res.failure = "seed " + std::to_string(k) + ": " + to_string(rep.outcome);
        }
      } catch (const Error& e) {
        res.failure = "seed " + std::to_string(k) + ": " + e.what();
      }
    }
  };
  const int jobs = std::max(1, params.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<SolutionSet::Entry> entries;
  set.seeds_attempted = params.n_seeds;
  for (int k = 0; k < params.n_seeds; ++k) {
    SeedResult& res = results[static_cast<std::size_t>(k)];
    if (!res.ok) {
      if (!res.failure.empty()) set.failures.push_back(res.failure);
      continue;
    }
    ++set.seeds_converged;
    SolutionSet::Entry e;
    e.key = canonicalize(res.report.state);
    e.report = std::move(res.report);
    e.seed_config = configs[static_cast<std::size_t>(k)];
    e.seed_index = k;
    entries.push_back(std::move(e));
  }
  if (set.seeds_converged == 0)
    throw SolveError("multistart: no seed converged (" + std::to_string(set.failures.size()) +
                     " failures)");
  dedup_by_orbit(entries, params.cfg.dedup_tol);
  set.orbits = std::move(entries);
  return set;
}

std::vector<StageResult> continuation(const ContinuationParams& params) {
  params.cm.validate(true);
  params.cfg.validate();
  if (!params.cache) throw ConfigError("continuation: a ground-state cache is required");
  if (params.eps_schedule.size() < 1) throw ConfigError("continuation: empty eps schedule");
  for (std::size_t k = 0; k + 1 < params.eps_schedule.size(); ++k)
    if (!(params.eps_schedule[k] > params.eps_schedule[k + 1]))
      throw ConfigError("continuation: eps schedule must be strictly decreasing");
  if (!(params.resolution >= 8.0))
    throw ConfigError("continuation: need eps/h >= 8 (spike must span at least 8 cells)");

  const double eps0 = params.eps_schedule.front();
  auto stage_h = [&](double eps) {
    // eps/h = resolution * (eps0/eps)^growth: refine faster than the spike
    // shrinks so discretization bias decays along the schedule.
    const double ratio = params.resolution * std::pow(eps0 / eps, params.refine_growth);
    return eps / ratio;
  };

  std::vector<GroundState> ws_refs = whole_space_references(params.cm, *params.cache);
  double c_sum = 0.0;
  for (double c : oracle_limit_energies(params.cm)) c_sum += c;

  std::vector<StageResult> stages;

  // First stage: small multistart, keep the least-energy orbit.
  MultistartParams ms;
  ms.spec = params.spec;
  ms.h = stage_h(eps0);
  ms.cm = params.cm;
  ms.eps = eps0;
  ms.r = params.r;
  ms.n_seeds = params.n_seeds;
  ms.rng_seed = params.rng_seed;
  ms.cfg = params.cfg;
  ms.jobs = params.jobs;
  ms.cache = params.cache;
  SolutionSet first = multistart(ms);
  {
    StageResult st;
    st.eps = eps0;
    st.h = ms.h;
    st.report = first.orbits.front().report;
    st.energy_gap = std::abs(st.report.energy - c_sum);
    stages.push_back(std::move(st));
  }

  for (std::size_t k = 1; k < params.eps_schedule.size(); ++k) {
    const double eps = params.eps_schedule[k];
    const double h = stage_h(eps);
    const DomainPtr dom = make_domain(params.spec, h);
    const SystemState& prev = stages.back().report.state;

    SystemState warm;
    warm.eps = eps;
    warm.comp.reserve(prev.comp.size());
    for (const Field& f : prev.comp) {
      Field g(dom);
      const Grid& grid = dom->grid;
      const auto& inside = dom->mask.inside;
      for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
          const std::size_t n = grid.index(i, j);
          if (inside[n]) g.v[n] = bilinear_at(f, grid.node(i, j));
        }
      warm.comp.push_back(std::move(g));
    }

    StageResult st;
    st.eps = eps;
    st.h = h;
    try {
      st.report = descend(warm, params.cm, params.cfg);
    } catch (const Error& e) {
      throw SolveError("continuation: branch lost at stage " + std::to_string(k) +
                       " (eps=" + std::to_string(eps) + "): " + e.what());
    }
    if (st.report.outcome != Outcome::converged)
      throw SolveError("continuation: branch lost at stage " + std::to_string(k) +
                       " (eps=" + std::to_string(eps) + "): " + to_string(st.report.outcome));
    st.report.concentration = concentration_error(st.report.state, ws_refs);
    st.energy_gap = std::abs(st.report.energy - c_sum);
    stages.push_back(std::move(st));
  }

  // Stage 0 metrics, now that references exist.
  stages.front().report.concentration = concentration_error(stages.front().report.state, ws_refs);
  return stages;
}

}  // namespace spikelab

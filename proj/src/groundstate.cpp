#include "spikelab/groundstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spikelab/io.hpp"
#include "spikelab/riesz.hpp"

namespace spikelab {

namespace {

struct ScalarRun {
  Field u;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::array<double, 3>> trace;  // iter, energy, grad_norm
};

double scalar_energy(double a, double b, double beta, double p) {
  return 0.5 * a - beta * b / (2.0 * p);
}

// Closed-form Nehari reprojection; returns the scaled (a, b) and energy.
bool reproject(Field& u, double beta, double p, double eps, double& a, double& b) {
  a = eps_norm_sq(u, eps);
  b = mixed_integral(u, u, p, eps);
  if (!(a > 0.0) || !(b > 0.0)) return false;
  const double t = std::pow(a / (beta * b), 1.0 / (2.0 * p - 2.0));
  scale(u, t);
  a *= t * t;
  b *= std::pow(t, 2.0 * p);
  return true;
}

ScalarRun scalar_descent(const DomainPtr& dom, double beta, double p, double eps, Field init,
                         const ScalarSolveOptions& opt) {
  const CouplingMatrix cm = CouplingMatrix::scalar(beta, p);
  RieszSolver riesz(dom, eps);
  ScalarRun run;
  run.u = std::move(init);

  double a = 0.0, b = 0.0;
  if (!reproject(run.u, beta, p, eps, a, b))
    throw SolveError("scalar solve: initial iterate has no Nehari multiple");
  run.energy = scalar_energy(a, b, beta, p);

  SystemState st;
  st.eps = eps;
  st.comp.push_back(run.u);

  Field G, prev_G;
  double step_init = 1.0, prev_gn2 = 0.0, prev_step = 0.0;
  std::vector<double> recent_energies{run.energy};  // nonmonotone window
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    st.comp[0] = run.u;
    const Field g = partial_gradient(st, cm, 0);
    const double prev_cross = prev_step > 0.0 ? dot_nodes(prev_G, g) : 0.0;
    G = riesz.apply(g, iter > 0 ? &G : nullptr);
    const double gn2 = dot_nodes(g, G);
    // spectral trial step, Armijo-safeguarded (see solver.cpp)
    if (prev_step > 0.0) {
      const double denom = prev_gn2 - prev_cross;
      step_init = denom > 0.0 ? std::clamp(prev_step * prev_gn2 / denom, 1e-10, 1e12)
                              : std::min(4.0 * prev_step, 1e12);
    }
    run.grad_norm = std::sqrt(std::max(gn2, 0.0));
    run.iterations = iter;
    run.trace.push_back({static_cast<double>(iter), run.energy, run.grad_norm});
    if (run.grad_norm <= opt.grad_tol * std::sqrt(a)) {
      run.converged = true;
      return run;
    }

    // Near the tolerance the Armijo decrease c*s*gn2 drops below the rounding
    // error of the energy itself; the allowance keeps full steps acceptable in
    // that regime (the preconditioned iteration still contracts).
    const double slack = 4.0 * 2.220446049250313e-16 * (std::abs(run.energy) + a);
    double e_ref = run.energy;
    for (double e : recent_energies) e_ref = std::max(e_ref, e);
    double step = step_init;
    bool accepted = false;
    for (int halvings = 0; halvings < 90; ++halvings) {
      Field trial = run.u;
      axpy(trial, -step, G);
      double at = 0.0, bt = 0.0;
      if (reproject(trial, beta, p, eps, at, bt)) {
        const double et = scalar_energy(at, bt, beta, p);
        if (et <= e_ref - 1e-4 * step * gn2 + slack) {
          run.u = std::move(trial);
          run.energy = et;
          a = at;
          b = bt;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) return run;  // stalled; caller decides
    recent_energies.push_back(run.energy);
    if (recent_energies.size() > 10) recent_energies.erase(recent_energies.begin());
    prev_G = G;
    prev_gn2 = gn2;
    prev_step = step;
  }
  return run;
}

Field gaussian_bump(const DomainPtr& dom, Point c, double width) {
  Field f(dom);
  const Grid& g = dom->grid;
  const auto& inside = dom->mask.inside;
  const double iw2 = 1.0 / (2.0 * width * width);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (!inside[k]) continue;
      const Point x = g.node(i, j);
      const double d2 = (x.x - c.x) * (x.x - c.x) + (x.y - c.y) * (x.y - c.y);
      f.v[k] = std::exp(-d2 * iw2);
    }
  return f;
}

std::string trace_tail(const ScalarRun& run) {
  std::ostringstream os;
  const std::size_t n = run.trace.size();
  for (std::size_t k = n > 5 ? n - 5 : 0; k < n; ++k)
    os << "  iter " << run.trace[k][0] << ": energy " << run.trace[k][1] << ", grad "
       << run.trace[k][2] << "\n";
  return os.str();
}

}  // namespace

GroundState solve_scalar(const DomainSpec& domain, const Grid& grid, double beta, double p,
                         double eps, const ScalarSolveOptions& opt) {
  if (!(beta > 0.0)) throw ConfigError("solve_scalar: beta must be positive");
  if (!(p > 1.0)) throw ConfigError("solve_scalar: p must exceed 1");
  if (!(eps > 0.0)) throw ConfigError("solve_scalar: eps must be positive");
  const DomainPtr dom = make_domain(domain, grid);

  ScalarRun best;
  bool have = false;
  if (std::min(grid.nx, grid.ny) > opt.cascade_cells) {
    // Start from the solution of the same problem at 2h; the fine sweep then
    // only has to remove high-frequency error.
    const GroundState coarse = solve_scalar(domain, Grid::cover(domain, 2.0 * grid.h), beta, p, eps, opt);
    Field init(dom);
    const auto& inside = dom->mask.inside;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const std::size_t k = grid.index(i, j);
        if (inside[k]) init.v[k] = bilinear_at(coarse.profile, grid.node(i, j));
      }
    best = scalar_descent(dom, beta, p, eps, std::move(init), opt);
    have = best.converged;
  }
  if (!have) {
    for (double wf : opt.width_factors) {
      ScalarRun run = scalar_descent(dom, beta, p, eps, gaussian_bump(dom, domain.center, wf * eps), opt);
      if (!run.converged) continue;
      if (!have || run.energy < best.energy) best = std::move(run);
      have = true;
    }
  }
  if (!have) {
    ScalarRun probe = scalar_descent(dom, beta, p, eps, gaussian_bump(dom, domain.center, eps), opt);
    throw SolveError("solve_scalar did not converge for " + domain.describe() + ", beta=" +
                     std::to_string(beta) + ", eps=" + std::to_string(eps) + "; last iterates:\n" +
                     trace_tail(probe));
  }

  GroundState gs;
  gs.profile = std::move(best.u);
  gs.energy = best.energy;
  gs.mass = inner_l2(gs.profile, gs.profile);
  gs.beta = beta;
  gs.p = p;
  gs.eps = eps;
  gs.domain = domain;
  gs.grad_norm = best.grad_norm;
  gs.iterations = best.iterations;
  return gs;
}

RadialOracleResult radial_shooting_oracle(double beta, double p, double rmax, double tol) {
  if (!(beta > 0.0) || !(p > 1.0)) throw OracleError("radial oracle: need beta > 0 and p > 1");
  const double dr = 1e-3;
  const int nsteps = static_cast<int>(std::ceil(rmax / dr));
  const double q = 2.0 * p;

  // classification: +1 crossed zero (w0 too large), -1 turned up or reached
  // rmax still positive (w0 too small / undecidable at this rmax)
  auto shoot = [&](double c, RadialOracleResult* capture) -> int {
    double w = c, v = 0.0;
    if (capture) {
      capture->rho.push_back(0.0);
      capture->w.push_back(w);
      capture->dw.push_back(v);
    }
    auto rhs = [&](double rho, double wi, double vi, double& dw, double& dv) {
      dw = vi;
      const double nl = wi - beta * dpow_abs(wi, q);
      dv = (rho == 0.0) ? 0.5 * nl : nl - vi / rho;
    };
    for (int k = 0; k < nsteps; ++k) {
      const double rho = k * dr;
      double k1w, k1v, k2w, k2v, k3w, k3v, k4w, k4v;
      rhs(rho, w, v, k1w, k1v);
      rhs(rho + 0.5 * dr, w + 0.5 * dr * k1w, v + 0.5 * dr * k1v, k2w, k2v);
      rhs(rho + 0.5 * dr, w + 0.5 * dr * k2w, v + 0.5 * dr * k2v, k3w, k3v);
      rhs(rho + dr, w + dr * k3w, v + dr * k3v, k4w, k4v);
      w += dr / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
      v += dr / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (!std::isfinite(w) || !std::isfinite(v)) return -1;
      if (w <= 0.0) return +1;
      if (v > 0.0 && rho > 0.5) return -1;
      if (capture) {
        capture->rho.push_back(rho + dr);
        capture->w.push_back(w);
        capture->dw.push_back(v);
      }
    }
    return -1;
  };

  // Bracket: start just above the constant stationary value beta^{-1/(2p-2)}
  // (always an undershoot) and grow until the solution crosses zero.
  const double c_stat = std::pow(beta, -1.0 / (q - 2.0));
  double lo = 1.05 * c_stat;
  int guard = 0;
  while (shoot(lo, nullptr) == +1) {
    lo *= 0.7;
    if (++guard > 60) throw OracleError("radial oracle: cannot find an undershoot bracket");
  }
  double hi = std::max(2.0 * c_stat, 1.5 * lo);
  guard = 0;
  while (shoot(hi, nullptr) != +1) {
    hi *= 1.5;
    if (++guard > 60) throw OracleError("radial oracle: cannot find an overshoot bracket");
  }
  while (hi - lo > std::max(tol * hi, 4.0 * std::abs(hi) * 2.220446049250313e-16)) {
    const double mid = 0.5 * (lo + hi);
    if (shoot(mid, nullptr) == +1)
      hi = mid;
    else
      lo = mid;
  }

  RadialOracleResult out;
  shoot(lo, &out);  // the undershoot side stays positive over the captured range
  out.w0 = lo;

  // Radial quadrature (Simpson on the uniform table; trapezoid at an odd tail).
  auto radial_integral = [&](auto f) {
    const std::size_t n = out.rho.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    std::size_t k = 0;
    while (k + 2 < n) {
      s += dr / 3.0 * (f(k) + 4.0 * f(k + 1) + f(k + 2));
      k += 2;
    }
    if (k + 1 < n) s += 0.5 * dr * (f(k) + f(k + 1));
    return s;
  };
  const double two_pi = 2.0 * std::acos(-1.0);
  auto wk = [&](std::size_t k) { return out.w[k]; };
  auto vk = [&](std::size_t k) { return out.dw[k]; };
  auto rk = [&](std::size_t k) { return out.rho[k]; };
  out.mass = two_pi * radial_integral([&](std::size_t k) { return wk(k) * wk(k) * rk(k); });
  const double kinetic =
      two_pi * radial_integral([&](std::size_t k) { return (vk(k) * vk(k) + wk(k) * wk(k)) * rk(k); });
  const double potential =
      two_pi * radial_integral([&](std::size_t k) { return beta * pow_abs(wk(k), q) * rk(k); });
  out.energy = 0.5 * kinetic - potential / q;
  return out;
}

Field place(const GroundState& gs, Point xi, const DomainPtr& target) {
  if (gs.domain.shape != Shape::disk)
    throw PlacementError("place: profile was not solved on a ball");
  const double r = gs.domain.a;
  if (!(boundary_distance(target->spec, xi) > r))
    throw PlacementError("place: support ball of radius " + std::to_string(r) +
                         " does not fit inside the domain at the requested point");
  const Grid& sg = gs.profile.dom->grid;
  const Grid& tg = target->grid;
  if (std::abs(sg.h - tg.h) > 1e-12 * tg.h)
    throw PlacementError("place: profile and target grid spacings differ");

  const int sci = static_cast<int>(std::lround((gs.domain.center.x - sg.origin.x) / sg.h));
  const int scj = static_cast<int>(std::lround((gs.domain.center.y - sg.origin.y) / sg.h));
  const int tci = static_cast<int>(std::lround((xi.x - tg.origin.x) / tg.h));
  const int tcj = static_cast<int>(std::lround((xi.y - tg.origin.y) / tg.h));

  Field out(target);
  const auto& s_inside = gs.profile.dom->mask.inside;
  const auto& t_inside = target->mask.inside;
  for (int j = 0; j < sg.ny; ++j)
    for (int i = 0; i < sg.nx; ++i) {
      const std::size_t sk = sg.index(i, j);
      if (!s_inside[sk]) continue;
      const double val = gs.profile.v[sk];
      if (val == 0.0) continue;
      const int ti = tci + (i - sci);
      const int tj = tcj + (j - scj);
      if (ti < 0 || tj < 0 || ti >= tg.nx || tj >= tg.ny || !t_inside[tg.index(ti, tj)])
        throw PlacementError("place: translated support leaves the domain");
      out.v[tg.index(ti, tj)] = val;
    }
  return out;
}

GroundState rescale_to_beta(const GroundState& gs, double beta_new) {
  if (!(beta_new > 0.0)) throw ConfigError("rescale_to_beta: beta must be positive");
  GroundState out = gs;
  const double lam = std::pow(gs.beta / beta_new, 1.0 / (2.0 * gs.p - 2.0));
  scale(out.profile, lam);
  out.energy *= std::pow(gs.beta / beta_new, 1.0 / (gs.p - 1.0));
  out.mass *= lam * lam;
  out.beta = beta_new;
  return out;
}

namespace {

std::string cache_key(const DomainSpec& d, double h, double beta, double p, double eps) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "shape=%d;a=%.17g;b=%.17g;cx=%.17g;cy=%.17g;beta=%.17g;p=%.17g;eps=%.17g;h=%.17g",
                static_cast<int>(d.shape), d.a, d.b, d.center.x, d.center.y, beta, p, eps, h);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t x = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    x ^= c;
    x *= 0x100000001b3ULL;
  }
  return x;
}

}  // namespace

GroundStateCache::GroundStateCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

GroundState GroundStateCache::get_or_solve(const DomainSpec& domain, double h, double beta,
                                           double p, double eps, const ScalarSolveOptions& opt) {
  const std::string key = cache_key(domain, h, beta, p, eps);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  const auto bin = dir_ / ("gs_" + std::string(hex) + ".bin");
  const auto meta = dir_ / ("gs_" + std::string(hex) + ".json");

  if (std::filesystem::exists(bin) && std::filesystem::exists(meta)) {
    std::ifstream is(meta);
    nlohmann::json j;
    is >> j;
    if (j.at("key").get<std::string>() != key)
      throw Error("ground-state cache: key mismatch in " + meta.string());
    const DomainPtr dom = make_domain(domain, Grid::cover(domain, h));
    GroundState gs;
    gs.profile = field_from_raw(read_field_binary(bin), dom);
    gs.energy = j.at("energy").get<double>();
    gs.mass = j.at("mass").get<double>();
    gs.beta = beta;
    gs.p = p;
    gs.eps = eps;
    gs.domain = domain;
    gs.grad_norm = j.at("grad_norm").get<double>();
    gs.iterations = j.at("iterations").get<int>();
    return gs;
  }

  GroundState gs = solve_scalar(domain, Grid::cover(domain, h), beta, p, eps, opt);
  nlohmann::json j;
  j["key"] = key;
  j["energy"] = gs.energy;
  j["mass"] = gs.mass;
  j["grad_norm"] = gs.grad_norm;
  j["iterations"] = gs.iterations;
  const auto tmp_bin = bin.string() + ".tmp";
  const auto tmp_meta = meta.string() + ".tmp";
  write_field_binary(tmp_bin, gs.profile);
  {
    std::ofstream os(tmp_meta);
    os << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp_bin, bin);
  std::filesystem::rename(tmp_meta, meta);
  return gs;
}

}  // namespace spikelab

#include "spikelab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spikelab/diagnostics.hpp"
#include "spikelab/nehari.hpp"
#include "spikelab/rng.hpp"
#include "spikelab/seeding.hpp"
#include "spikelab/system.hpp"

namespace spikelab {

namespace {

Field random_field(const DomainPtr& dom, RandomStream& rng, double amp = 1.0) {
  Field f(dom);
  const auto& inside = dom->mask.inside;
  for (std::size_t k = 0; k < f.v.size(); ++k)
    if (inside[k]) f.v[k] = rng.uniform(-amp, amp);
  return f;
}

Field bump(const DomainPtr& dom, Point c, double width, double amp = 1.0,
           double cutoff = std::numeric_limits<double>::infinity()) {
  Field f(dom);
  const Grid& g = dom->grid;
  const auto& inside = dom->mask.inside;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (!inside[k]) continue;
      const Point x = g.node(i, j);
      const double d2 = (x.x - c.x) * (x.x - c.x) + (x.y - c.y) * (x.y - c.y);
      if (d2 > cutoff * cutoff) continue;
      f.v[k] = amp * std::exp(-d2 / (2.0 * width * width));
    }
  return f;
}

struct Check {
  bool pass = true;
  std::ostringstream detail;
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

SuiteResult suite_coupling_validation() {
  Check c;
  try {
    CouplingMatrix::defaults().validate();
  } catch (const Error&) {
    c.expect(false, "default matrix rejected");
  }
  auto expect_reject = [&](CouplingMatrix cm, const std::string& why) {
    try {
      cm.validate();
      c.expect(false, "accepted invalid matrix (" + why + ")");
    } catch (const ConfigError&) {
    }
  };
  CouplingMatrix wrong_sign = CouplingMatrix::defaults();
  wrong_sign.beta[1] = wrong_sign.beta[2] = +0.5;
  expect_reject(wrong_sign, "positive off-diagonal");
  CouplingMatrix asym = CouplingMatrix::defaults();
  asym.beta[1] = -0.5;
  expect_reject(asym, "asymmetric");
  CouplingMatrix bad_diag = CouplingMatrix::defaults();
  bad_diag.beta[0] = -1.0;
  expect_reject(bad_diag, "nonpositive diagonal");
  CouplingMatrix bad_p = CouplingMatrix::defaults();
  bad_p.p = 1.0;
  expect_reject(bad_p, "p <= 1");
  return {"coupling-matrix validation", c.pass, c.detail.str()};
}

SuiteResult suite_summation_by_parts(RandomStream rng) {
  Check c;
  const DomainPtr dom = make_domain(DomainSpec::disk(1.0), 2.0 / 40.0);
  for (int rep = 0; rep < 5; ++rep) {
    const Field f = random_field(dom, rng);
    const Field g = random_field(dom, rng);
    const Field lg = laplacian(g);
    const double lhs = dirichlet_inner(f, g);
    double rhs = 0.0;
    const double h2 = dom->grid.h * dom->grid.h;
    for (std::size_t k = 0; k < f.v.size(); ++k) rhs -= f.v[k] * lg.v[k] * h2;
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    c.expect(std::abs(lhs - rhs) / scale < 1e-10, "summation-by-parts residual too large");
  }
  return {"summation-by-parts", c.pass, c.detail.str()};
}

SuiteResult suite_gradient_fd(RandomStream rng) {
  Check c;
  const DomainPtr dom = make_domain(DomainSpec::disk(1.0), 2.0 / 24.0);
  for (double p : {1.5, 2.0}) {
    CouplingMatrix cm = CouplingMatrix::defaults(2, p);
    for (int rep = 0; rep < 3; ++rep) {
      SystemState u;
      u.eps = 0.4;
      u.comp = {random_field(dom, rng), random_field(dom, rng)};
      for (int i = 0; i < 2; ++i) {
        const Field v = random_field(dom, rng);
        const Field g = partial_gradient(u, cm, i);
        const double predicted = dot_nodes(g, v);
        const double delta = 1e-5;
        SystemState up = u, um = u;
        axpy(up.comp[static_cast<std::size_t>(i)], delta, v);
        axpy(um.comp[static_cast<std::size_t>(i)], -delta, v);
        const double fd = (energy(up, cm) - energy(um, cm)) / (2.0 * delta);
        const double rel = std::abs(predicted - fd) / std::max(std::abs(fd), 1e-12);
        c.expect(rel < 1e-6, "gradient mismatch (p=" + std::to_string(p) + ")");
      }
    }
  }
  return {"gradient finite-difference", c.pass, c.detail.str()};
}

SuiteResult suite_euler_identity(RandomStream rng) {
  Check c;
  const DomainPtr dom = make_domain(DomainSpec::disk(1.0), 2.0 / 32.0);
  const CouplingMatrix cm = CouplingMatrix::defaults();
  for (int rep = 0; rep < 5; ++rep) {
    SystemState u;
    u.eps = 0.5;
    u.comp = {random_field(dom, rng), random_field(dom, rng)};
    const double J = energy(u, cm);
    const std::vector<double> K = constraint_values(u, cm);
    const EnergyTerms t = energy_terms(u, cm);
    double ksum = 0.0, asum = 0.0;
    for (double k : K) ksum += k;
    for (double a : t.a) asum += a;
    const double lhs = J - ksum / (2.0 * cm.p);
    const double rhs = (0.5 - 0.5 / cm.p) * asum;
    c.expect(std::abs(lhs - rhs) <= 1e-12 * std::max({std::abs(J), asum, 1.0}),
             "energy/constraint identity violated");
  }
  return {"euler identity", c.pass, c.detail.str()};
}

SuiteResult suite_nehari(RandomStream rng) {
  Check c;
  const DomainPtr dom = make_domain(DomainSpec::disk(1.0), 2.0 / 48.0);
  const CouplingMatrix cm = CouplingMatrix::defaults();
  for (int rep = 0; rep < 3; ++rep) {
    SystemState u;
    u.eps = 0.4;
    u.comp = {bump(dom, {-0.3, rng.uniform(-0.1, 0.1)}, 0.3, rng.uniform(0.5, 2.0)),
              bump(dom, {0.35, rng.uniform(-0.1, 0.1)}, 0.25, rng.uniform(0.5, 2.0))};
    auto np = try_project(u, cm);
    if (!np) {
      c.expect(false, "projection failed on a benign state");
      continue;
    }
    c.expect(std::abs(nehari_energy_identity(*np, cm)) <= 1e-9 * std::abs(np->energy),
             "on-manifold energy identity violated");
    auto np2 = try_project(np->state, cm);
    c.expect(np2.has_value(), "reprojection failed");
    if (np2) {
      double worst = 0.0;
      for (double t : np2->t) worst = std::max(worst, std::abs(t - 1.0));
      c.expect(worst < 1e-8, "projection not idempotent");
    }
    SystemState scaled = np->state;
    scale(scaled.comp[0], 3.0);
    scale(scaled.comp[1], 0.2);
    auto np3 = try_project(scaled, cm);
    c.expect(np3.has_value(), "ray reprojection failed");
    if (np3) {
      c.expect(std::abs(np3->energy - np->energy) <= 1e-8 * std::abs(np->energy),
               "psi not constant along rays");
    }
  }
  return {"nehari projection", c.pass, c.detail.str()};
}

SuiteResult suite_z_invariance(RandomStream rng) {
  Check c;
  const DomainPtr dom = make_domain(DomainSpec::disk(1.0), 2.0 / 32.0);
  const CouplingMatrix cm = CouplingMatrix::defaults();
  SystemState u;
  u.eps = 0.5;
  u.comp = {bump(dom, {-0.3, 0.1}, 0.3), bump(dom, {0.3, -0.1}, 0.25)};
  axpy(u.comp[0], 0.2, random_field(dom, rng, 0.05));
  axpy(u.comp[1], 0.2, random_field(dom, rng, 0.05));
  const double e0 = energy(u, cm);
  const auto k0 = constraint_values(u, cm);
  const auto b0 = barycenter_vec(u);
  for (const std::vector<int>& sv : {std::vector<int>{-1, 1}, {1, -1}, {-1, -1}}) {
    const SystemState su = apply_sign(u, SignVector{sv});
    c.expect(energy(su, cm) == e0, "energy not Z-invariant");
    const auto ks = constraint_values(su, cm);
    c.expect(ks == k0, "constraints not Z-invariant");
    const auto bs = barycenter_vec(su);
    for (std::size_t i = 0; i < bs.size(); ++i)
      c.expect(bs[i].x == b0[i].x && bs[i].y == b0[i].y, "barycenter not Z-invariant");
    const OrbitKey osu = canonicalize(su);
    const OrbitKey ou = canonicalize(u);
    for (int i = 0; i < 2; ++i)
      c.expect(osu.canonical.comp[static_cast<std::size_t>(i)].v ==
                   ou.canonical.comp[static_cast<std::size_t>(i)].v,
               "canonicalize not orbit-invariant");
  }
  return {"Z-invariance", c.pass, c.detail.str()};
}

SuiteResult suite_barycenter() {
  Check c;
  const DomainPtr dom = make_domain(DomainSpec::rectangle(2.0, 2.0), 1.0 / 16.0);
  const Grid& g = dom->grid;
  // compact support keeps the shifted copy clear of the boundary
  Field f = bump(dom, {0.25, -0.25}, 0.12, 1.0, 0.5);

  Field neg = f;
  scale(neg, -1.0);
  const Point b1 = barycenter(f), b1n = barycenter(neg);
  c.expect(b1.x == b1n.x && b1.y == b1n.y, "(B1) sign invariance violated");

  // (B2): shift by two cells in x, one in y (field supported well inside)
  Field shifted(dom);
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 2 < g.nx; ++i)
      if (dom->mask.inside[g.index(i + 2, j + 1)])
        shifted.v[g.index(i + 2, j + 1)] = f.v[g.index(i, j)];
  const Point b2 = barycenter(shifted);
  c.expect(std::abs(b2.x - (b1.x + 2.0 * g.h)) < 1e-12 && std::abs(b2.y - (b1.y + g.h)) < 1e-12,
           "(B2) shift equivariance violated");

  // (B3): grid-symmetric field about the center node
  Field sym(dom);
  const int ci = (g.nx - 1) / 2, cj = (g.ny - 1) / 2;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (!dom->mask.inside[k]) continue;
      const int di = std::abs(i - ci), dj = std::abs(j - cj);
      sym.v[k] = 1.0 / (1.0 + di * di + dj * dj);
    }
  enforce_mask(sym);
  const Point b3 = barycenter(sym);
  const Point ctr = g.node(ci, cj);
  c.expect(std::abs(b3.x - ctr.x) < 1e-12 && std::abs(b3.y - ctr.y) < 1e-12,
           "(B3) symmetric field barycenter off center");

  // (B4): node-value-preserving rescale by 1/2
  Grid g2 = g;
  g2.h = g.h / 2.0;
  g2.origin = {g.origin.x / 2.0, g.origin.y / 2.0};
  const DomainPtr dom2 = make_domain(DomainSpec::rectangle(1.0, 1.0), g2);
  Field half(dom2);
  half.v = f.v;
  enforce_mask(half);
  const Point b4 = barycenter(half);
  c.expect(b4.x == b1.x / 2.0 && b4.y == b1.y / 2.0, "(B4) rescale equivariance violated");
  return {"barycenter properties", c.pass, c.detail.str()};
}

SuiteResult suite_scaling_identities() {
  Check c;
  const double h = 1.0 / 16.0, eps = 0.5;
  const DomainPtr dom = make_domain(DomainSpec::disk(1.0), h);
  const DomainPtr dom2 = make_domain(DomainSpec::disk(2.0), h / eps);
  Field u = bump(dom, {0.2, -0.1}, 0.3);
  c.expect(dom->grid.nx == dom2->grid.nx && dom->grid.ny == dom2->grid.ny,
           "rescaled grid does not match");
  if (c.pass) {
    Field w(dom2);
    w.v = u.v;
    enforce_mask(w);
    c.expect(w.v == u.v, "rescaled mask differs");
    c.expect(eps_norm_sq(u, eps) == eps_norm_sq(w, 1.0), "eps-norm rescale identity violated");
    const CouplingMatrix cm = CouplingMatrix::scalar(1.0, 2.0);
    SystemState su, sw;
    su.eps = eps;
    su.comp = {u};
    sw.eps = 1.0;
    sw.comp = {w};
    c.expect(energy(su, cm) == energy(sw, cm), "energy rescale identity violated");
  }
  return {"rescaling identities", c.pass, c.detail.str()};
}

SuiteResult suite_config_predicates(RandomStream rng) {
  Check c;
  const DomainSpec disk = DomainSpec::disk(1.0);
  const int n = 10000;
  // E_{l,0} = F_{l,0}
  for (int k = 0; k < n; ++k) {
    Configuration cfg;
    cfg.r = 0.0;
    for (int i = 0; i < 3; ++i) cfg.points.push_back({rng.uniform(-1.1, 1.1), rng.uniform(-1.1, 1.1)});
    if (in_E(cfg, disk) != in_F(cfg, disk)) {
      c.expect(false, "E_{l,0} != F_l");
      break;
    }
  }
  // F_{l, 2^l r} subset of E_{l,r}
  const double r0 = 0.04;
  int positives = 0;
  for (int k = 0; k < n; ++k) {
    Configuration cfg;
    cfg.r = std::ldexp(r0, 3);  // 2^l r with l = 3
    for (int i = 0; i < 3; ++i) cfg.points.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    if (!in_F(cfg, disk)) continue;
    ++positives;
    Configuration cfgE = cfg;
    cfgE.r = r0;
    if (!in_E(cfgE, disk)) {
      c.expect(false, "containment F_{l,2^l r} in E_{l,r} violated");
      break;
    }
  }
  c.expect(positives > 10, "containment test had too few positive cases");
  // permutation invariance of in_F
  for (int k = 0; k < 200; ++k) {
    Configuration cfg;
    cfg.r = 0.1;
    for (int i = 0; i < 3; ++i) cfg.points.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    Configuration perm = cfg;
    std::swap(perm.points[0], perm.points[2]);
    if (in_F(cfg, disk) != in_F(perm, disk)) {
      c.expect(false, "in_F not permutation invariant");
      break;
    }
  }
  // in_E is order dependent
  Configuration ordered;
  ordered.r = 0.05;
  ordered.points = {{0.7, 0.0}, {-0.85, 0.0}};
  Configuration swapped = ordered;
  std::swap(swapped.points[0], swapped.points[1]);
  c.expect(in_E(ordered, disk) && !in_E(swapped, disk), "in_E should depend on the ordering");
  return {"configuration predicates", c.pass, c.detail.str()};
}

}  // namespace

std::vector<SuiteResult> run_verification_suites(std::uint64_t rng_seed) {
  RandomStream root(rng_seed);
  std::vector<SuiteResult> out;
  out.push_back(suite_coupling_validation());
  out.push_back(suite_summation_by_parts(root.split(1)));
  out.push_back(suite_gradient_fd(root.split(2)));
  out.push_back(suite_euler_identity(root.split(3)));
  out.push_back(suite_nehari(root.split(4)));
  out.push_back(suite_z_invariance(root.split(5)));
  out.push_back(suite_barycenter());
  out.push_back(suite_scaling_identities());
  out.push_back(suite_config_predicates(root.split(6)));
  return out;
}

}  // namespace spikelab

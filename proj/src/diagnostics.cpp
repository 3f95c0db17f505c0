#include "spikelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spikelab {

const char* to_string(SignClass s) {
  switch (s) {
    case SignClass::nonnegative:
      return "nonnegative";
    case SignClass::nonpositive:
      return "nonpositive";
    case SignClass::sign_changing:
      return "sign_changing";
    case SignClass::zero:
      return "zero";
  }
  return "?";
}

Point barycenter(const Field& f) {
  const Grid& g = f.dom->grid;
  const auto& inside = f.dom->mask.inside;
  double sx = 0.0, sy = 0.0, sw = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (!inside[k] || f.v[k] == 0.0) continue;
      const double w = f.v[k] * f.v[k];
      const Point x = g.node(i, j);
      sx += x.x * w;
      sy += x.y * w;
      sw += w;
    }
  if (sw == 0.0) throw Error("barycenter: field is identically zero");
  return {sx / sw, sy / sw};
}

std::vector<Point> barycenter_vec(const SystemState& state) {
  std::vector<Point> b;
  b.reserve(state.comp.size());
  for (const Field& f : state.comp) b.push_back(barycenter(f));
  return b;
}

SignClass sign_classify(const Field& f, double delta_rel) {
  if (delta_rel < 0.0) throw ConfigError("sign_classify: delta_rel must be nonnegative");
  double lo = 0.0, hi = 0.0;
  const auto& inside = f.dom->mask.inside;
  for (std::size_t k = 0; k < f.v.size(); ++k) {
    if (!inside[k]) continue;
    lo = std::min(lo, f.v[k]);
    hi = std::max(hi, f.v[k]);
  }
  const double amax = std::max(-lo, hi);
  if (amax == 0.0) return SignClass::zero;
  const bool nonneg = lo >= -delta_rel * amax;
  const bool nonpos = hi <= delta_rel * amax;
  if (nonneg) return SignClass::nonnegative;
  if (nonpos) return SignClass::nonpositive;
  return SignClass::sign_changing;
}

OrbitKey canonicalize(const SystemState& state) {
  OrbitKey key;
  key.signs = SignVector::ones(state.ell());
  key.canonical = state;
  for (int i = 0; i < state.ell(); ++i) {
    const double m = integrate(state.comp[static_cast<std::size_t>(i)]);
    if (m < 0.0) {
      key.signs.s[static_cast<std::size_t>(i)] = -1;
      scale(key.canonical.comp[static_cast<std::size_t>(i)], -1.0);
    }
  }
  return key;
}

double orbit_distance(const SystemState& a, const SystemState& b) {
  if (a.ell() != b.ell()) throw Error("orbit_distance: component counts differ");
  for (int i = 0; i < a.ell(); ++i)
    if (!same_discretization(a.comp[static_cast<std::size_t>(i)], b.comp[static_cast<std::size_t>(i)]))
      throw Error("orbit_distance: states live on different grids");
  const OrbitKey ka = canonicalize(a);
  const OrbitKey kb = canonicalize(b);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.ell(); ++i) {
    Field diff = ka.canonical.comp[static_cast<std::size_t>(i)];
    axpy(diff, -1.0, kb.canonical.comp[static_cast<std::size_t>(i)]);
    num += norm_l2(diff);
    den += 0.5 * (norm_l2(ka.canonical.comp[static_cast<std::size_t>(i)]) +
                  norm_l2(kb.canonical.comp[static_cast<std::size_t>(i)]));
  }
  if (den == 0.0) return 0.0;
  return num / den;
}

std::vector<double> concentration_error(const SystemState& state,
                                        const std::vector<GroundState>& whole_space) {
  if (whole_space.size() != static_cast<std::size_t>(state.ell()))
    throw ConfigError("concentration_error: need one reference profile per component");
  std::vector<double> err;
  err.reserve(whole_space.size());
  const double eps = state.eps;
  for (int i = 0; i < state.ell(); ++i) {
    const Field& ui = state.comp[static_cast<std::size_t>(i)];
    const GroundState& ref = whole_space[static_cast<std::size_t>(i)];
    const Grid& rg = ref.profile.dom->grid;
    const Point bc = barycenter(ui);
    // snap the estimated center to the state grid so aligned cases stay exact
    const Grid& sg = ui.dom->grid;
    const double ci = std::round((bc.x - sg.origin.x) / sg.h);
    const double cj = std::round((bc.y - sg.origin.y) / sg.h);
    const Point center{sg.origin.x + ci * sg.h, sg.origin.y + cj * sg.h};

    Field sampled(ref.profile.dom);
    const Point ref_center = ref.domain.center;
    for (int j = 0; j < rg.ny; ++j)
      for (int i2 = 0; i2 < rg.nx; ++i2) {
        const std::size_t k = rg.index(i2, j);
        if (!ref.profile.dom->mask.inside[k]) continue;
        const Point z = rg.node(i2, j) - ref_center;
        sampled.v[k] = bilinear_at(ui, center + eps * z);
      }

    // window coverage: the rescaled samples must hold ~all of the component's mass
    const double mass_window = eps * eps * inner_l2(sampled, sampled);
    const double mass_total = inner_l2(ui, ui);
    if (mass_total > 0.0 && mass_window < 0.99 * mass_total)
      throw WindowError("concentration_error: window captures " +
                        std::to_string(mass_window / mass_total) + " of component " +
                        std::to_string(i) + " mass; reference grid too small");

    Field diff = sampled;
    axpy(diff, -1.0, ref.profile);
    // discrete H1 norms at eps = 1 (the rescaled frame)
    err.push_back(std::sqrt(eps_norm_sq(diff, 1.0) / eps_norm_sq(ref.profile, 1.0)));
  }
  return err;
}

double separation_ratio(const SystemState& state) {
  if (state.ell() < 2) throw Error("separation_ratio: need at least two components");
  const std::vector<Point> b = barycenter_vec(state);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) m = std::min(m, dist(b[i], b[j]));
  return m / state.eps;
}

std::vector<double> local_mass(const SystemState& state, const CouplingMatrix& cm) {
  std::vector<double> out;
  out.reserve(state.comp.size());
  for (int i = 0; i < state.ell(); ++i) {
    const Field& ui = state.comp[static_cast<std::size_t>(i)];
    const Point bc = barycenter(ui);
    const Grid& g = ui.dom->grid;
    const auto& inside = ui.dom->mask.inside;
    const double s2 = (g.h / state.eps) * (g.h / state.eps);
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.nx; ++k) {
        const std::size_t n = g.index(k, j);
        if (!inside[n]) continue;
        if (dist(g.node(k, j), bc) >= state.eps) continue;
        acc += pow_abs(ui.v[n], 2.0 * cm.p);
      }
    out.push_back(cm.bval(i, i) * s2 * acc);
  }
  return out;
}

}  // namespace spikelab

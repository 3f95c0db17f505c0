#include "spikelab/system.hpp"

#include <cmath>
#include <string>

namespace spikelab {

void CouplingMatrix::validate(bool allow_scalar) const {
  const int min_ell = allow_scalar ? 1 : 2;
  if (ell < min_ell) throw ConfigError("coupling.ell: need at least " + std::to_string(min_ell) + " components");
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("coupling.p: exponent must exceed 1");
  if (beta.size() != static_cast<std::size_t>(ell) * static_cast<std::size_t>(ell))
    throw ConfigError("coupling.beta: expected a row-major " + std::to_string(ell) + "x" +
                      std::to_string(ell) + " matrix");
  for (int i = 0; i < ell; ++i) {
    if (!(bval(i, i) > 0.0))
      throw ConfigError("coupling.beta: diagonal entry beta[" + std::to_string(i) + "][" +
                        std::to_string(i) + "] must be positive");
    for (int j = 0; j < ell; ++j) {
      if (!std::isfinite(bval(i, j))) throw ConfigError("coupling.beta: entries must be finite");
      if (bval(i, j) != bval(j, i)) throw ConfigError("coupling.beta: matrix must be symmetric");
      if (i != j && !(bval(i, j) < 0.0))
        throw ConfigError("coupling.beta: off-diagonal entry beta[" + std::to_string(i) + "][" +
                          std::to_string(j) + "] must be negative (competitive regime)");
    }
  }
}

CouplingMatrix CouplingMatrix::defaults(int ell, double p) {
  CouplingMatrix cm;
  cm.ell = ell;
  cm.p = p;
  cm.beta.assign(static_cast<std::size_t>(ell) * ell, -1.0);
  // Distinct diagonal entries keep component-permuted states energetically
  // distinguishable, so permutation copies are not counted as extra orbits.
  for (int i = 0; i < ell; ++i) cm.beta[static_cast<std::size_t>(i) * ell + i] = 1.0 + 0.5 * i;
  cm.validate();
  return cm;
}

CouplingMatrix CouplingMatrix::scalar(double beta, double p) {
  CouplingMatrix cm;
  cm.ell = 1;
  cm.p = p;
  cm.beta = {beta};
  cm.validate(true);
  return cm;
}

void SystemState::validate() const {
  if (comp.empty()) throw Error("system state: no components");
  if (!(eps > 0.0)) throw ConfigError("system state: eps must be positive");
  for (const Field& f : comp) {
    if (!same_discretization(f, comp.front())) throw Error("system state: components on different grids");
    if (!all_finite(f)) throw Error("system state: non-finite field values");
  }
}

EnergyTerms energy_terms(const SystemState& state, const CouplingMatrix& cm) {
  const int ell = state.ell();
  EnergyTerms t;
  t.a.resize(static_cast<std::size_t>(ell));
  t.b.assign(static_cast<std::size_t>(ell) * ell, 0.0);
  for (int i = 0; i < ell; ++i) t.a[static_cast<std::size_t>(i)] = eps_norm_sq(state.comp[i], state.eps);
  for (int i = 0; i < ell; ++i)
    for (int j = i; j < ell; ++j) {
      const double m = mixed_integral(state.comp[i], state.comp[j], cm.p, state.eps);
      t.b[static_cast<std::size_t>(i) * ell + j] = m;
      t.b[static_cast<std::size_t>(j) * ell + i] = m;
    }
  return t;
}

double energy_from_terms(const EnergyTerms& t, const CouplingMatrix& cm) {
  const int ell = cm.ell;
  double quad = 0.0, coup = 0.0;
  for (int i = 0; i < ell; ++i) quad += t.a[static_cast<std::size_t>(i)];
  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j) coup += cm.bval(i, j) * t.bval(i, j, ell);
  return 0.5 * quad - coup / (2.0 * cm.p);
}

double energy(const SystemState& state, const CouplingMatrix& cm) {
  return energy_from_terms(energy_terms(state, cm), cm);
}

Field partial_gradient(const SystemState& state, const CouplingMatrix& cm, int i) {
  const Field& ui = state.comp[static_cast<std::size_t>(i)];
  const Grid& grid = ui.dom->grid;
  const auto& inside = ui.dom->mask.inside;
  const double s2 = (grid.h / state.eps) * (grid.h / state.eps);
  const int ell = state.ell();
  const double p = cm.p;

  Field g(ui.dom);
  for (int j = 1; j + 1 < grid.ny; ++j) {
    for (int k = 1; k + 1 < grid.nx; ++k) {
      const std::size_t n = grid.index(k, j);
      if (!inside[n]) continue;
      // graph Laplacian = -h^2 * discrete Laplacian; outside neighbors are 0
      double val = 4.0 * ui.v[n] - ui.v[n + 1] - ui.v[n - 1] - ui.v[n + grid.nx] - ui.v[n - grid.nx];
      double nonlin = 0.0;
      const double di = dpow_abs(ui.v[n], p);
      if (di != 0.0) {
        for (int m = 0; m < ell; ++m)
          nonlin += cm.bval(i, m) * pow_abs(state.comp[static_cast<std::size_t>(m)].v[n], p);
        nonlin *= di;
      }
      g.v[n] = val + s2 * (ui.v[n] - nonlin);
    }
  }
  return g;
}

std::vector<double> constraint_values(const SystemState& state, const CouplingMatrix& cm) {
  const EnergyTerms t = energy_terms(state, cm);
  const int ell = state.ell();
  std::vector<double> k(static_cast<std::size_t>(ell));
  for (int i = 0; i < ell; ++i) {
    double c = t.a[static_cast<std::size_t>(i)];
    for (int j = 0; j < ell; ++j) c -= cm.bval(i, j) * t.bval(i, j, ell);
    k[static_cast<std::size_t>(i)] = c;
  }
  return k;
}

double pde_residual_norm(const SystemState& state, const CouplingMatrix& cm) {
  const int ell = state.ell();
  const double eps2 = state.eps * state.eps;
  double worst = 0.0;
  for (int i = 0; i < ell; ++i) {
    const Field lap = laplacian(state.comp[static_cast<std::size_t>(i)]);
    const Field& ui = state.comp[static_cast<std::size_t>(i)];
    const auto& inside = ui.dom->mask.inside;
    double acc = 0.0;
    for (std::size_t n = 0; n < ui.v.size(); ++n) {
      if (!inside[n]) continue;
      double nonlin = 0.0;
      const double di = dpow_abs(ui.v[n], cm.p);
      if (di != 0.0) {
        for (int m = 0; m < ell; ++m)
          nonlin += cm.bval(i, m) * pow_abs(state.comp[static_cast<std::size_t>(m)].v[n], cm.p);
        nonlin *= di;
      }
      const double r = -eps2 * lap.v[n] + ui.v[n] - nonlin;
      acc += r * r;
    }
    worst = std::max(worst, std::sqrt(acc) * ui.h());
  }
  return worst;
}

SystemState apply_sign(const SystemState& state, const SignVector& s) {
  SystemState out = state;
  for (int i = 0; i < state.ell(); ++i)
    if (s.s[static_cast<std::size_t>(i)] < 0) scale(out.comp[static_cast<std::size_t>(i)], -1.0);
  return out;
}

double dot_nodes(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
  return s;
}

}  // namespace spikelab

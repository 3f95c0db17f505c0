#include "spikelab/nehari.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spikelab {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr int kMaxNewton = 200;
constexpr double kTmin = 1e-8;
constexpr double kTmax = 1e8;

// Gaussian elimination with partial pivoting; the systems are ell x ell.
bool solve_dense(std::vector<double>& m, std::vector<double>& rhs, int n) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[static_cast<std::size_t>(r) * n + c]) > std::abs(m[static_cast<std::size_t>(piv) * n + c]))
        piv = r;
    if (m[static_cast<std::size_t>(piv) * n + c] == 0.0) return false;
    if (piv != c) {
      for (int k = c; k < n; ++k)
        std::swap(m[static_cast<std::size_t>(piv) * n + k], m[static_cast<std::size_t>(c) * n + k]);
      std::swap(rhs[static_cast<std::size_t>(piv)], rhs[static_cast<std::size_t>(c)]);
    }
    const double d = m[static_cast<std::size_t>(c) * n + c];
    for (int r = c + 1; r < n; ++r) {
      const double f = m[static_cast<std::size_t>(r) * n + c] / d;
      if (f == 0.0) continue;
      for (int k = c; k < n; ++k)
        m[static_cast<std::size_t>(r) * n + k] -= f * m[static_cast<std::size_t>(c) * n + k];
      rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(c)];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[static_cast<std::size_t>(r)];
    for (int k = r + 1; k < n; ++k) s -= m[static_cast<std::size_t>(r) * n + k] * rhs[static_cast<std::size_t>(k)];
    rhs[static_cast<std::size_t>(r)] = s / m[static_cast<std::size_t>(r) * n + r];
  }
  return true;
}

struct ScaledResidual {
  std::vector<double> f;
  double worst = 0.0;  // max_i |f_i| / max(1, t_i^2 a_i)
};

ScaledResidual residual_at(const std::vector<double>& t, const EnergyTerms& terms,
                           const CouplingMatrix& cm) {
  // Residuals are normalized by the sum of the magnitudes of their terms. The
  // constraint system has the trivial root t = 0 (every term vanishes like
  // t^2); this ratio tends to 1 there, so only the genuine positive root can
  // satisfy the tolerance, and the test stays grid- and eps-uniform.
  const int ell = cm.ell;
  ScaledResidual r;
  r.f.resize(static_cast<std::size_t>(ell));
  for (int i = 0; i < ell; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    const double tip = std::pow(ti, cm.p);
    const double quad = ti * ti * terms.a[static_cast<std::size_t>(i)];
    double f = quad;
    double scale = quad;
    for (int j = 0; j < ell; ++j) {
      const double term =
          cm.bval(i, j) * terms.bval(i, j, ell) * tip * std::pow(t[static_cast<std::size_t>(j)], cm.p);
      f -= term;
      scale += std::abs(term);
    }
    r.f[static_cast<std::size_t>(i)] = f;
    r.worst = std::max(r.worst, std::abs(f) / std::max(scale, 1e-300));
  }
  return r;
}

}  // namespace

std::optional<NehariPoint> try_project(const SystemState& state, const CouplingMatrix& cm,
                                       ProjectionFailure* why) {
  const int ell = state.ell();
  auto fail = [&](ProjectionError::Kind k, const std::string& msg) -> std::optional<NehariPoint> {
    if (why) *why = ProjectionFailure{k, msg};
    return std::nullopt;
  };

  const EnergyTerms terms = energy_terms(state, cm);
  for (int i = 0; i < ell; ++i) {
    if (!(terms.a[static_cast<std::size_t>(i)] > 0.0))
      return fail(ProjectionError::Kind::zero_component,
                  "component " + std::to_string(i) + " is identically zero");
  }

  // Decoupled closed-form start; b_ii > 0 whenever the component is nonzero.
  std::vector<double> sigma(static_cast<std::size_t>(ell));
  for (int i = 0; i < ell; ++i)
    sigma[static_cast<std::size_t>(i)] =
        std::log(terms.a[static_cast<std::size_t>(i)] / (cm.bval(i, i) * terms.bval(i, i, ell))) /
        (2.0 * cm.p - 2.0);

  std::vector<double> t(static_cast<std::size_t>(ell));
  auto refresh_t = [&]() -> bool {
    for (int i = 0; i < ell; ++i) {
      t[static_cast<std::size_t>(i)] = std::exp(sigma[static_cast<std::size_t>(i)]);
      if (!(t[static_cast<std::size_t>(i)] >= kTmin && t[static_cast<std::size_t>(i)] <= kTmax)) return false;
    }
    return true;
  };
  if (!refresh_t()) return fail(ProjectionError::Kind::not_in_u, "closed-form start outside scaling bounds");

  ScaledResidual res = residual_at(t, terms, cm);
  int iterations = 0;
  bool polished = false;

  std::vector<double> jac(static_cast<std::size_t>(ell) * ell);
  std::vector<double> step(static_cast<std::size_t>(ell));

  while (true) {
    if (res.worst <= kResidualTol && polished) break;
    if (iterations >= kMaxNewton)
      return fail(ProjectionError::Kind::not_in_u,
                  "no convergence in " + std::to_string(kMaxNewton) + " Newton iterations");

    // Jacobian of f_i with respect to sigma_k.
    for (int i = 0; i < ell; ++i) {
      const double ti = t[static_cast<std::size_t>(i)];
      const double tip = std::pow(ti, cm.p);
      double coupled = 0.0;
      for (int j = 0; j < ell; ++j)
        coupled += cm.bval(i, j) * terms.bval(i, j, ell) * tip * std::pow(t[static_cast<std::size_t>(j)], cm.p);
      for (int k = 0; k < ell; ++k) {
        double jik = -cm.p * cm.bval(i, k) * terms.bval(i, k, ell) * tip *
                     std::pow(t[static_cast<std::size_t>(k)], cm.p);
        if (k == i) jik += 2.0 * ti * ti * terms.a[static_cast<std::size_t>(i)] - cm.p * coupled;
        jac[static_cast<std::size_t>(i) * ell + k] = jik;
      }
    }
    for (int i = 0; i < ell; ++i) step[static_cast<std::size_t>(i)] = -res.f[static_cast<std::size_t>(i)];
    std::vector<double> jcopy = jac;
    if (!solve_dense(jcopy, step, ell))
      return fail(ProjectionError::Kind::not_in_u, "singular Newton system");

    if (res.worst <= kResidualTol) {
      // One full polishing step once the tolerance is met; near the root Newton
      // contracts quadratically and pushes the residual to roundoff.
      for (int i = 0; i < ell; ++i) sigma[static_cast<std::size_t>(i)] += step[static_cast<std::size_t>(i)];
      if (!refresh_t()) return fail(ProjectionError::Kind::not_in_u, "scaling left [1e-8, 1e8]");
      res = residual_at(t, terms, cm);
      ++iterations;
      polished = true;
      continue;
    }

    // Damped step: halve until the normalized residual decreases.
    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> sigma_trial(static_cast<std::size_t>(ell));
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (int i = 0; i < ell; ++i)
        sigma_trial[static_cast<std::size_t>(i)] =
            sigma[static_cast<std::size_t>(i)] + alpha * step[static_cast<std::size_t>(i)];
      bool in_bounds = true;
      std::vector<double> t_trial(static_cast<std::size_t>(ell));
      for (int i = 0; i < ell; ++i) {
        t_trial[static_cast<std::size_t>(i)] = std::exp(sigma_trial[static_cast<std::size_t>(i)]);
        if (!(t_trial[static_cast<std::size_t>(i)] >= kTmin && t_trial[static_cast<std::size_t>(i)] <= kTmax)) {
          in_bounds = false;
          break;
        }
      }
      if (in_bounds) {
        const ScaledResidual trial = residual_at(t_trial, terms, cm);
        if (trial.worst < res.worst) {
          sigma = sigma_trial;
          t = t_trial;
          res = trial;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted)
      return fail(ProjectionError::Kind::not_in_u, "damped Newton stalled (residual not decreasing)");
    ++iterations;
  }

  NehariPoint np;
  np.state = state;
  for (int i = 0; i < ell; ++i) scale(np.state.comp[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)]);
  np.t = t;
  np.iterations = iterations;
  np.terms = energy_terms(np.state, cm);
  np.energy = energy_from_terms(np.terms, cm);
  np.residual.resize(static_cast<std::size_t>(ell));
  for (int i = 0; i < ell; ++i) {
    double c = np.terms.a[static_cast<std::size_t>(i)];
    for (int j = 0; j < ell; ++j) c -= cm.bval(i, j) * np.terms.bval(i, j, ell);
    np.residual[static_cast<std::size_t>(i)] = c;
  }
  return np;
}

NehariPoint project(const SystemState& state, const CouplingMatrix& cm) {
  ProjectionFailure why;
  auto np = try_project(state, cm, &why);
  if (!np) throw ProjectionError(why.kind, "nehari projection failed: " + why.detail);
  return std::move(*np);
}

double psi(const SystemState& state, const CouplingMatrix& cm) { return project(state, cm).energy; }

double nehari_energy_identity(const NehariPoint& np, const CouplingMatrix& cm) {
  double quad = 0.0;
  for (double a : np.terms.a) quad += a;
  return np.energy - (0.5 - 0.5 / cm.p) * quad;
}

}  // namespace spikelab

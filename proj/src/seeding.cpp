#include "spikelab/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spikelab/rng.hpp"

namespace spikelab {

bool in_F(const Configuration& cfg, const DomainSpec& spec) {
  const std::size_t ell = cfg.points.size();
  for (std::size_t i = 0; i < ell; ++i) {
    if (!(boundary_distance(spec, cfg.points[i]) > cfg.r)) return false;
    for (std::size_t j = i + 1; j < ell; ++j)
      if (!(dist(cfg.points[i], cfg.points[j]) > 2.0 * cfg.r)) return false;
  }
  return true;
}

bool in_E(const Configuration& cfg, const DomainSpec& spec) {
  const int ell = static_cast<int>(cfg.points.size());
  for (int i = 1; i <= ell; ++i) {
    const double threshold = std::ldexp(cfg.r, ell - i + 1);  // 2^{ell-i+1} r
    const Point& xi = cfg.points[static_cast<std::size_t>(i - 1)];
    // For r = 0 this degenerates to the open-set and distinctness tests of F_ell.
    if (!(boundary_distance(spec, xi) > threshold)) return false;
    for (int j = 1; j < i; ++j)
      if (!(dist(xi, cfg.points[static_cast<std::size_t>(j - 1)]) > threshold)) return false;
  }
  return true;
}

namespace {

Point sample_point_in_domain(const DomainSpec& spec, RandomStream& rng) {
  double hx = 0.0, hy = 0.0;
  switch (spec.shape) {
    case Shape::rectangle:
      hx = 0.5 * spec.a;
      hy = 0.5 * spec.b;
      break;
    case Shape::disk:
      hx = hy = spec.a;
      break;
    case Shape::ellipse:
      hx = spec.a;
      hy = spec.b;
      break;
  }
  for (;;) {
    const Point p{rng.uniform(spec.center.x - hx, spec.center.x + hx),
                  rng.uniform(spec.center.y - hy, spec.center.y + hy)};
    if (spec.contains(p)) return p;
  }
}

// Smallest slack over the F_{ell,r} constraints; positive iff the tuple is in F.
double config_margin(const Configuration& cfg, const DomainSpec& spec) {
  double m = std::numeric_limits<double>::infinity();
  const std::size_t ell = cfg.points.size();
  for (std::size_t i = 0; i < ell; ++i) {
    m = std::min(m, boundary_distance(spec, cfg.points[i]) - cfg.r);
    for (std::size_t j = i + 1; j < ell; ++j)
      m = std::min(m, 0.5 * dist(cfg.points[i], cfg.points[j]) - cfg.r);
  }
  return m;
}

}  // namespace

std::vector<Configuration> sample_F(const DomainSpec& spec, int ell, double r, int count,
                                    std::uint64_t rng_seed) {
  if (ell < 1) throw ConfigError("sample_F: ell must be positive");
  if (r < 0.0) throw ConfigError("sample_F: r must be nonnegative");
  constexpr long kBudget = 1000000;
  RandomStream root(rng_seed);
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(c));
    Configuration cfg;
    cfg.r = r;
    cfg.points.resize(static_cast<std::size_t>(ell));
    long rejected = 0;
    for (;;) {
      for (auto& p : cfg.points) p = sample_point_in_domain(spec, rng);
      if (in_F(cfg, spec)) break;
      if (++rejected >= kBudget)
        throw SamplingError("sample_F: exhausted " + std::to_string(kBudget) +
                            " rejections; r=" + std::to_string(r) + " is too large for " +
                            spec.describe());
    }
    // Farthest-point style refinement: per point, keep the resample that most
    // improves the worst constraint slack.
    double margin = config_margin(cfg, spec);
    for (int round = 0; round < 3; ++round) {
      for (auto& p : cfg.points) {
        const Point keep = p;
        Point best = keep;
        double best_margin = margin;
        for (int k = 0; k < 8; ++k) {
          p = sample_point_in_domain(spec, rng);
          const double m = config_margin(cfg, spec);
          if (m > best_margin) {
            best_margin = m;
            best = p;
          }
        }
        p = best;
        margin = best_margin;
      }
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

double auto_radius(const DomainSpec& spec, int ell, std::uint64_t rng_seed) {
  const double d = spec.diameter();
  for (double f : {0.3, 0.2, 0.15, 0.1, 0.05}) {
    const double r = f * d;
    try {
      sample_F(spec, ell, r, 1, rng_seed);
      return r;
    } catch (const SamplingError&) {
    }
  }
  throw ConfigError("auto_radius: no feasible separation radius for ell=" + std::to_string(ell) +
                    " on " + spec.describe());
}

SystemState i_eps(const Configuration& cfg, const std::vector<GroundState>& gs,
                  const DomainPtr& target) {
  const int ell = static_cast<int>(cfg.points.size());
  if (static_cast<int>(gs.size()) != ell)
    throw ConfigError("i_eps: need one ground state per configuration point");
  if (!in_F(cfg, target->spec)) throw ConfigError("i_eps: configuration is not in F_{ell,r}");
  const double eps = gs.front().eps;
  for (const GroundState& g : gs) {
    if (g.eps != eps) throw ConfigError("i_eps: ground states solved at different eps");
    if (g.domain.shape != Shape::disk || std::abs(g.domain.a - cfg.r) > 1e-12 * std::max(1.0, cfg.r))
      throw ConfigError("i_eps: ground states must live on the ball of radius r");
  }
  SystemState state;
  state.eps = eps;
  state.comp.reserve(static_cast<std::size_t>(ell));
  for (int i = 0; i < ell; ++i)
    state.comp.push_back(place(gs[static_cast<std::size_t>(i)], cfg.points[static_cast<std::size_t>(i)], target));
  return state;
}

}  // namespace spikelab

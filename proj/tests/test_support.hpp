#pragma once

#include <cmath>
#include <limits>

#include "spikelab/diagnostics.hpp"
#include "spikelab/nehari.hpp"
#include "spikelab/rng.hpp"
#include "spikelab/system.hpp"

namespace spikelab::testing {

inline Field gaussian(const DomainPtr& dom, Point c, double width, double amp = 1.0,
                      double cutoff = std::numeric_limits<double>::infinity()) {
  Field f(dom);
  const Grid& g = dom->grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (!dom->mask.inside[k]) continue;
      const Point x = g.node(i, j);
      const double d2 = (x.x - c.x) * (x.x - c.x) + (x.y - c.y) * (x.y - c.y);
      if (d2 > cutoff * cutoff) continue;
      f.v[k] = amp * std::exp(-d2 / (2.0 * width * width));
    }
  return f;
}

inline Field noise(const DomainPtr& dom, RandomStream& rng, double amp = 1.0) {
  Field f(dom);
  for (std::size_t k = 0; k < f.v.size(); ++k)
    if (dom->mask.inside[k]) f.v[k] = rng.uniform(-amp, amp);
  return f;
}

inline SystemState two_bumps(const DomainPtr& dom, double eps, double a1 = 1.0, double a2 = 1.0,
                             double w1 = 0.3, double w2 = 0.25) {
  SystemState u;
  u.eps = eps;
  u.comp = {gaussian(dom, {-0.35, 0.05}, w1, a1), gaussian(dom, {0.35, -0.05}, w2, a2)};
  return u;
}

}  // namespace spikelab::testing

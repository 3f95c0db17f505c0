#include "spikelab/riesz.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

namespace spikelab {

namespace {
// FFTW's planner is not thread-safe; executions on distinct buffers are.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RieszSolver::Impl {
  int nx = 0, ny = 0;
  double s2 = 0.0;  // (h/eps)^2
  double* buf = nullptr;
  fftw_plan plan = nullptr;
  std::vector<double> lam_x, lam_y;  // DST-I eigenvalues of the 1-D graph Laplacian
  std::vector<double> r, z, pdir, ap;

  ~Impl() {
    if (plan) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
    if (buf) fftw_free(buf);
  }
};

RieszSolver::RieszSolver(DomainPtr dom, double eps) : dom_(std::move(dom)), eps_(eps) {
  if (!(eps_ > 0.0)) throw ConfigError("riesz: eps must be positive");
  impl_ = std::make_unique<Impl>();
  const Grid& g = dom_->grid;
  impl_->nx = g.nx;
  impl_->ny = g.ny;
  impl_->s2 = (g.h / eps_) * (g.h / eps_);
  const std::size_t n = g.size();
  impl_->buf = fftw_alloc_real(n);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->plan = fftw_plan_r2r_2d(g.ny, g.nx, impl_->buf, impl_->buf, FFTW_RODFT00, FFTW_RODFT00,
                                   FFTW_ESTIMATE);
  }
  if (!impl_->plan) throw Error("riesz: fftw plan creation failed");
  impl_->lam_x.resize(static_cast<std::size_t>(g.nx));
  impl_->lam_y.resize(static_cast<std::size_t>(g.ny));
  const double pi = std::acos(-1.0);
  for (int i = 0; i < g.nx; ++i)
    impl_->lam_x[static_cast<std::size_t>(i)] = 2.0 - 2.0 * std::cos(pi * (i + 1) / (g.nx + 1));
  for (int j = 0; j < g.ny; ++j)
    impl_->lam_y[static_cast<std::size_t>(j)] = 2.0 - 2.0 * std::cos(pi * (j + 1) / (g.ny + 1));
  impl_->r.resize(n);
  impl_->z.resize(n);
  impl_->pdir.resize(n);
  impl_->ap.resize(n);
}

RieszSolver::~RieszSolver() = default;

namespace {

// y = (graphLap + s2 I) x on inside nodes, 0 elsewhere.
void masked_matvec(const Domain& dom, double s2, const std::vector<double>& x, std::vector<double>& y) {
  const Grid& g = dom.grid;
  const auto& inside = dom.mask.inside;
  const int nx = g.nx;
  std::fill(y.begin(), y.end(), 0.0);
  for (int j = 1; j + 1 < g.ny; ++j) {
    const std::size_t row = g.index(0, j);
    for (int i = 1; i + 1 < nx; ++i) {
      const std::size_t k = row + static_cast<std::size_t>(i);
      if (!inside[k]) continue;
      y[k] = (4.0 + s2) * x[k] - x[k + 1] - x[k - 1] - x[k + static_cast<std::size_t>(nx)] -
             x[k - static_cast<std::size_t>(nx)];
    }
  }
}

}  // namespace

Field RieszSolver::apply_forward(const Field& x) const {
  Field y(dom_);
  masked_matvec(*dom_, impl_->s2, x.v, y.v);
  return y;
}

Field RieszSolver::apply(const Field& g, const Field* warm_start, double rel_tol) const {
  Impl& im = *impl_;
  const Domain& dom = *dom_;
  const auto& inside = dom.mask.inside;
  const std::size_t n = dom.grid.size();
  const double dst_norm = 1.0 / (4.0 * (im.nx + 1) * (im.ny + 1));

  auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) im.buf[k] = in[k];
    fftw_execute(im.plan);
    for (int j = 0; j < im.ny; ++j) {
      const double ly = im.lam_y[static_cast<std::size_t>(j)];
      double* row = im.buf + static_cast<std::size_t>(j) * im.nx;
      for (int i = 0; i < im.nx; ++i)
        row[i] /= im.lam_x[static_cast<std::size_t>(i)] + ly + im.s2;
    }
    fftw_execute(im.plan);
    for (std::size_t k = 0; k < n; ++k) out[k] = inside[k] ? im.buf[k] * dst_norm : 0.0;
  };

  Field x(dom_);
  double bnorm2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double b = inside[k] ? g.v[k] : 0.0;
    im.r[k] = b;
    bnorm2 += b * b;
  }
  if (bnorm2 == 0.0) {
    last_iterations_ = 0;
    return x;
  }
  if (warm_start && warm_start->dom == dom_) {
    x.v = warm_start->v;
    masked_matvec(dom, im.s2, x.v, im.ap);
    for (std::size_t k = 0; k < n; ++k) im.r[k] -= im.ap[k];
  }
  const double tol2 = rel_tol * rel_tol * bnorm2;

  precondition(im.r, im.z);
  im.pdir = im.z;
  double rz = 0.0;
  for (std::size_t k = 0; k < n; ++k) rz += im.r[k] * im.z[k];

  const int max_iter = 500;
  int it = 0;
  for (; it < max_iter; ++it) {
    masked_matvec(dom, im.s2, im.pdir, im.ap);
    double pap = 0.0;
    for (std::size_t k = 0; k < n; ++k) pap += im.pdir[k] * im.ap[k];
    if (pap <= 0.0) break;  // exact zero direction; r already below tolerance in practice
    const double alpha = rz / pap;
    double rnorm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      x.v[k] += alpha * im.pdir[k];
      im.r[k] -= alpha * im.ap[k];
      rnorm2 += im.r[k] * im.r[k];
    }
    if (rnorm2 <= tol2) {
      ++it;
      break;
    }
    precondition(im.r, im.z);
    double rz_new = 0.0;
    for (std::size_t k = 0; k < n; ++k) rz_new += im.r[k] * im.z[k];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) im.pdir[k] = im.z[k] + beta * im.pdir[k];
  }
  last_iterations_ = it;
  enforce_mask(x);
  return x;
}

}  // namespace spikelab

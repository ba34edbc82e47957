#include "l1subdiv/refine2d.hpp"

#include <cmath>

#include "l1subdiv/errors.hpp"
#include "parallel.hpp"

namespace l1subdiv {

GridMesh GridMesh::component(std::size_t c) const {
  if (c >= dim) throw InputError("component index out of range");
  GridMesh out = *this;
  out.dim = 1;
  out.values.resize(rows * cols);
  for (std::size_t k = 0; k < rows * cols; ++k) out.values[k] = values[k * dim + c];
  return out;
}

GridMesh GridMesh::transposed() const {
  GridMesh out = *this;
  std::swap(out.rows, out.cols);
  std::swap(out.topology[0], out.topology[1]);
  std::swap(out.origin[0], out.origin[1]);
  std::swap(out.spacing[0], out.spacing[1]);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t c = 0; c < dim; ++c) out.at(j, i, c) = at(i, j, c);
    }
  }
  return out;
}

void SchemeSpec2D::validate() const { fit.validate(2); }

std::vector<std::array<double, 2>> abscissae_2d(Parity parity) {
  const double lo = parity == Parity::even ? 0.25 : -0.25;
  const double hi = parity == Parity::even ? 0.75 : 0.25;
  return {{lo, lo}, {hi, lo}, {lo, hi}, {hi, hi}};
}

namespace {

struct AxisPlan {
  BoundaryPolicy policy;
  std::size_t len;
  std::size_t centers;
  long first_center;
};

AxisPlan plan_axis(std::size_t len, Topology topology, BoundaryPolicy boundary, const FitConfig& fit) {
  const auto h = static_cast<std::size_t>(fit.stencil_size());
  if (len < h) {
    throw InputError("mesh axis has " + std::to_string(len) + " nodes, the stencil needs " +
                     std::to_string(h));
  }
  AxisPlan plan{topology == Topology::closed ? BoundaryPolicy::periodic : boundary, len, len, 0};
  if (plan.policy == BoundaryPolicy::shrink) {
    plan.centers = len - h + 1;
    plan.first_center = -fit.first_offset();
  }
  return plan;
}

std::size_t resolve(const AxisPlan& plan, long j) {
  const auto L = static_cast<long>(plan.len);
  switch (plan.policy) {
    case BoundaryPolicy::periodic: {
      long k = j % L;
      return static_cast<std::size_t>(k < 0 ? k + L : k);
    }
    case BoundaryPolicy::mirror: {
      const long last = L - 1;
      while (j < 0 || j > last) {
        if (j < 0) j = -j;
        if (j > last) j = 2 * last - j;
      }
      return static_cast<std::size_t>(j);
    }
    case BoundaryPolicy::shrink: break;
  }
  return static_cast<std::size_t>(j);
}

}  // namespace

GridMesh refine_once_2d(const GridMesh& mesh, const SchemeSpec2D& spec, const RefineOptions& options) {
  spec.validate();
  if (mesh.dim == 0 || mesh.values.size() != mesh.rows * mesh.cols * mesh.dim) {
    throw InputError("mesh dimensions do not match its value count");
  }
  for (double v : mesh.values) {
    if (!std::isfinite(v)) throw InputError("mesh contains a non-finite value");
  }
  const AxisPlan pi = plan_axis(mesh.rows, mesh.topology[0], spec.boundary[0], spec.fit);
  const AxisPlan pj = plan_axis(mesh.cols, mesh.topology[1], spec.boundary[1], spec.fit);
  const auto side = static_cast<std::size_t>(spec.fit.stencil_size());
  const long first = spec.fit.first_offset();
  const auto pts = abscissae_2d(spec.fit.parity);
  const double lo = pts.front()[0];
  const std::size_t dim = mesh.dim;

  GridMesh out;
  out.rows = 2 * pi.centers;
  out.cols = 2 * pj.centers;
  out.dim = dim;
  out.level = mesh.level + 1;
  out.topology = mesh.topology;
  out.origin = {mesh.param(0, static_cast<std::size_t>(pi.first_center)) + lo * mesh.spacing[0],
                mesh.param(1, static_cast<std::size_t>(pj.first_center)) + lo * mesh.spacing[1]};
  out.spacing = {mesh.spacing[0] / 2.0, mesh.spacing[1] / 2.0};
  out.values.assign(out.rows * out.cols * dim, 0.0);

  const std::size_t total = pi.centers * pj.centers;
  const unsigned workers = detail::resolve_threads(options.threads, total);
  std::vector<RefineStats> stats(workers);
  detail::parallel_chunks(total, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    std::vector<double> stencil(side * side);
    std::vector<std::size_t> ri(side), rj(side);
    for (std::size_t t = begin; t < end; ++t) {
      const std::size_t a = t / pj.centers;
      const std::size_t b = t % pj.centers;
      for (std::size_t k = 0; k < side; ++k) {
        ri[k] = resolve(pi, pi.first_center + static_cast<long>(a) + first + static_cast<long>(k));
        rj[k] = resolve(pj, pj.first_center + static_cast<long>(b) + first + static_cast<long>(k));
      }
      for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t u = 0; u < side; ++u) {
          for (std::size_t v = 0; v < side; ++v) stencil[u * side + v] = mesh.at(ri[u], rj[v], c);
        }
        const FitResult2D fit = irls_fit_2d(stencil, spec.fit);
        stats[w].fits += 1;
        stats[w].iterations += static_cast<std::size_t>(fit.iterations);
        stats[w].converged += fit.converged ? 1 : 0;
        stats[w].ill_conditioned += fit.ill_conditioned ? 1 : 0;
        for (std::size_t q = 0; q < pts.size(); ++q) {
          const std::size_t oi = 2 * a + (q % 2);
          const std::size_t oj = 2 * b + (q / 2);
          out.at(oi, oj, c) = eval_poly_2d(fit.beta, pts[q][0], pts[q][1]);
        }
      }
    }
  });
  if (options.stats != nullptr) {
    for (const auto& s : stats) options.stats->merge(s);
  }
  return out;
}

GridMesh subdivide_2d(const GridMesh& mesh, const SchemeSpec2D& spec, int levels,
                      const RefineOptions& options) {
  if (levels < 0) throw ConfigError("levels must be >= 0");
  GridMesh current = mesh;
  for (int k = 0; k < levels; ++k) current = refine_once_2d(current, spec, options);
  return current;
}

}  // namespace l1subdiv

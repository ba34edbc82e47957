#include "l1subdiv/refine1d.hpp"

#include <cmath>

#include "l1subdiv/errors.hpp"
#include "parallel.hpp"

namespace l1subdiv {

std::string to_string(BoundaryPolicy policy) {
  switch (policy) {
    case BoundaryPolicy::shrink: return "shrink";
    case BoundaryPolicy::periodic: return "periodic";
    case BoundaryPolicy::mirror: return "mirror";
  }
  return "shrink";
}

BoundaryPolicy parse_boundary(const std::string& text) {
  if (text == "shrink") return BoundaryPolicy::shrink;
  if (text == "periodic") return BoundaryPolicy::periodic;
  if (text == "mirror") return BoundaryPolicy::mirror;
  throw ConfigError("unknown boundary policy '" + text + "' (expected shrink, periodic or mirror)");
}

std::vector<double> ControlPolygon::component(std::size_t c) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, c);
  return out;
}

ControlPolygon ControlPolygon::scalar(std::vector<double> values, double origin, double spacing) {
  ControlPolygon p;
  p.values = std::move(values);
  p.origin = origin;
  p.spacing = spacing;
  return p;
}

void SchemeSpec::validate() const {
  fit.validate(3);
  if (arity < 2) throw ConfigError("arity must be >= 2");
}

SchemeSpec make_scheme(int points, int degree) {
  SchemeSpec spec;
  spec.fit.degree = degree;
  spec.fit.parity = points % 2 == 0 ? Parity::even : Parity::odd;
  spec.fit.n = points / 2;
  return spec;
}

std::string scheme_name(const SchemeSpec& spec) {
  return "D_{" + std::to_string(spec.points()) + "," + std::to_string(spec.fit.degree) + "}";
}

double Mask::apply(std::span<const double> stencil) const {
  if (stencil.size() != coeffs.size()) throw InputError("mask and stencil differ in length");
  double v = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) v += coeffs[k] * stencil[k];
  return v;
}

double Mask::sum() const {
  double s = 0.0;
  for (double c : coeffs) s += c;
  return s;
}

void RefineStats::merge(const RefineStats& other) {
  fits += other.fits;
  iterations += other.iterations;
  converged += other.converged;
  ill_conditioned += other.ill_conditioned;
}

std::vector<double> abscissae(Parity parity, int arity) {
  if (arity < 2) throw ConfigError("arity must be >= 2");
  const double N = arity;
  std::vector<double> out;
  if (parity == Parity::even) {
    for (int m = 1; m <= arity; ++m) out.push_back((2.0 * m - 1.0) / (2.0 * N));
    return out;
  }
  if (arity % 2 != 0) {
    // The 0-inclusive list for odd arity mixes even and odd numerators and
    // does not give equally spaced points; refuse rather than guess.
    throw UnsupportedError("odd-parity schemes support even arity only, got " + std::to_string(arity));
  }
  for (int m = -(arity - 1); m <= arity - 1; m += 2) out.push_back(m / (2.0 * N));
  return out;
}

namespace {

std::size_t wrap(long j, std::size_t len) {
  const auto L = static_cast<long>(len);
  long k = j % L;
  if (k < 0) k += L;
  return static_cast<std::size_t>(k);
}

std::size_t reflect(long j, std::size_t len) {
  const auto last = static_cast<long>(len) - 1;
  while (j < 0 || j > last) {
    if (j < 0) j = -j;
    if (j > last) j = 2 * last - j;
  }
  return static_cast<std::size_t>(j);
}

}  // namespace

ControlPolygon refine_once(const ControlPolygon& polygon, const SchemeSpec& spec,
                           const RefineOptions& options) {
  spec.validate();
  if (polygon.dim == 0) throw InputError("polygon has zero components per point");
  if (polygon.values.size() % polygon.dim != 0) throw InputError("polygon value count is not a multiple of dim");
  for (double v : polygon.values) {
    if (!std::isfinite(v)) throw InputError("polygon contains a non-finite value");
  }
  const auto xs = abscissae(spec.fit.parity, spec.arity);
  const BoundaryPolicy policy =
      polygon.topology == Topology::closed ? BoundaryPolicy::periodic : spec.boundary;
  const std::size_t len = polygon.size();
  const auto h = static_cast<std::size_t>(spec.points());
  const long first = spec.fit.first_offset();
  if (len < h) {
    throw InputError("polygon has " + std::to_string(len) + " points, " + scheme_name(spec) +
                     " needs at least " + std::to_string(h));
  }
  const std::size_t centers = policy == BoundaryPolicy::shrink ? len - h + 1 : len;
  const long first_center = policy == BoundaryPolicy::shrink ? -first : 0;
  const std::size_t arity = xs.size();
  const std::size_t dim = polygon.dim;

  ControlPolygon out;
  out.dim = dim;
  out.level = polygon.level + 1;
  out.topology = polygon.topology;
  out.origin = polygon.param(static_cast<std::size_t>(first_center)) + xs.front() * polygon.spacing;
  out.spacing = polygon.spacing / static_cast<double>(spec.arity);
  out.values.assign(centers * arity * dim, 0.0);

  const unsigned workers = detail::resolve_threads(options.threads, centers);
  std::vector<RefineStats> stats(workers);
  detail::parallel_chunks(centers, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    std::vector<double> stencil(h);
    for (std::size_t c = begin; c < end; ++c) {
      const long center = first_center + static_cast<long>(c);
      for (std::size_t comp = 0; comp < dim; ++comp) {
        for (std::size_t k = 0; k < h; ++k) {
          const long j = center + first + static_cast<long>(k);
          std::size_t idx = static_cast<std::size_t>(j);
          if (policy == BoundaryPolicy::periodic) idx = wrap(j, len);
          if (policy == BoundaryPolicy::mirror) idx = reflect(j, len);
          stencil[k] = polygon.values[idx * dim + comp];
        }
        const FitResult fit = irls_fit(stencil, spec.fit);
        stats[w].fits += 1;
        stats[w].iterations += static_cast<std::size_t>(fit.iterations);
        stats[w].converged += fit.converged ? 1 : 0;
        stats[w].ill_conditioned += fit.ill_conditioned ? 1 : 0;
        for (std::size_t m = 0; m < arity; ++m) {
          out.values[(c * arity + m) * dim + comp] = eval_poly(fit.beta, xs[m]);
        }
      }
    }
  });
  if (options.stats != nullptr) {
    for (const auto& s : stats) options.stats->merge(s);
  }
  return out;
}

ControlPolygon subdivide(const ControlPolygon& polygon, const SchemeSpec& spec, int levels,
                         const RefineOptions& options) {
  if (levels < 0) throw ConfigError("levels must be >= 0");
  ControlPolygon current = polygon;
  for (int k = 0; k < levels; ++k) current = refine_once(current, spec, options);
  return current;
}

namespace {

void check_parity(std::span<const double> weights, Parity parity) {
  const bool even = weights.size() % 2 == 0;
  if (even != (parity == Parity::even) || weights.size() < 4) {
    throw InputError("weight count " + std::to_string(weights.size()) + " does not match " +
                     to_string(parity) + " parity");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("weights must be positive and finite");
  }
}

}  // namespace

std::vector<Mask> masks_d1_closed_form(std::span<const double> weights, Parity parity) {
  check_parity(weights, parity);
  const MomentVector m = moments(weights, 1);
  const double a0 = m.alpha(0), a1 = m.alpha(1), a2 = m.alpha(2);
  const double chi0 = a0 * a2 - a1 * a1;
  const auto r = stencil_abscissae(weights.size());

  auto t1 = [&](double x) { return 4 * a2 - 4 * x * a1 + x * a0 - a1; };
  auto t2 = [&](double x) { return 4 * a2 - 4 * x * a1 + 3 * x * a0 - 3 * a1; };
  auto t3 = [&](double x) { return 4 * a2 - 4 * x * a1 - x * a0 + a1; };

  Mask left{parity == Parity::even ? 0.25 : -0.25, std::vector<double>(weights.size())};
  Mask right{parity == Parity::even ? 0.75 : 0.25, std::vector<double>(weights.size())};
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double scale = weights[k] / (4.0 * chi0);
    if (parity == Parity::even) {
      left.coeffs[k] = t1(r[k]) * scale;
      right.coeffs[k] = t2(r[k]) * scale;
    } else {
      left.coeffs[k] = t3(r[k]) * scale;
      right.coeffs[k] = t1(r[k]) * scale;
    }
  }
  return {left, right};
}

std::vector<Mask> masks_d2_closed_form(std::span<const double> weights, Parity parity) {
  check_parity(weights, parity);
  const MomentVector m = moments(weights, 2);
  const double a0 = m.alpha(0), a1 = m.alpha(1), a2 = m.alpha(2), a3 = m.alpha(3), a4 = m.alpha(4);
  const double chi0 = a0 * a2 - a1 * a1;
  const double chi1 = a0 * a3 - a1 * a2;
  const double chi3 = a0 * a4 - a2 * a2;
  const double lambda0 = chi0 * chi3 - chi1 * chi1;
  const auto rs = stencil_abscissae(weights.size());

  auto q1 = [&](double r) {
    return r * r * a0 * a2 + 4 * a0 * r * a4 - 4 * a0 * a3 * r * r - a0 * a3 * r - a2 * a2 -
           4 * a2 * a2 * r - 16 * r * r * a2 * a2 + a1 * a2 * r + 4 * a2 * a3 + 4 * a2 * a1 * r * r +
           16 * a2 * a3 * r + 16 * a4 * a2 - 16 * a1 * a4 * r + a1 * a3 - 16 * a3 * a3 -
           r * r * a1 * a1 + 16 * r * r * a1 * a3 - 4 * a1 * a4;
  };
  auto q2 = [&](double r) {
    return 9 * r * r * a0 * a2 + 12 * a0 * r * a4 - 9 * a0 * a3 * r - 12 * a0 * a3 * r * r -
           12 * a2 * a2 * r - 9 * a2 * a2 - 16 * r * r * a2 * a2 + 9 * a1 * a2 * r +
           12 * a2 * a1 * r * r + 16 * a4 * a2 + 12 * a2 * a3 + 16 * a2 * a3 * r + 9 * a1 * a3 -
           16 * a1 * a4 * r - 12 * a1 * a4 - 9 * r * r * a1 * a1 + 16 * r * r * a1 * a3 - 16 * a3 * a3;
  };
  auto q3 = [&](double r) {
    return -16 * r * r * a2 * a2 + 16 * a2 * a4 + 16 * a2 * a3 * r - 16 * a1 * a4 * r +
           16 * r * r * a1 * a3 - 16 * a3 * a3 - 4 * a0 * r * a4 + 4 * a0 * a3 * r * r +
           4 * r * a2 * a2 - 4 * a2 * a3 - 4 * a2 * a1 * r * r + 4 * a1 * a4 + r * r * a0 * a2 -
           r * r * a1 * a1 - a2 * a2 - a0 * a3 * r + a1 * a3 + a1 * a2 * r;
  };

  Mask left{parity == Parity::even ? 0.25 : -0.25, std::vector<double>(weights.size())};
  Mask right{parity == Parity::even ? 0.75 : 0.25, std::vector<double>(weights.size())};
  const double norm = a0 / (16.0 * lambda0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double scale = norm * weights[k];
    if (parity == Parity::even) {
      left.coeffs[k] = q1(rs[k]) * scale;
      right.coeffs[k] = q2(rs[k]) * scale;
    } else {
      left.coeffs[k] = q3(rs[k]) * scale;
      right.coeffs[k] = q1(rs[k]) * scale;
    }
  }
  return {left, right};
}

std::vector<Mask> generic_masks(std::span<const double> weights, int degree, Parity parity,
                                int arity) {
  check_parity(weights, parity);
  const auto xs = abscissae(parity, arity);
  std::vector<Mask> out;
  for (double x : xs) out.push_back(Mask{x, std::vector<double>(weights.size())});
  std::vector<double> impulse(weights.size(), 0.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    impulse.assign(weights.size(), 0.0);
    impulse[k] = 1.0;
    const Beta beta = wls_solve(impulse, weights, degree);
    for (auto& mask : out) mask.coeffs[k] = eval_poly(beta, mask.abscissa);
  }
  return out;
}

std::vector<Mask> constant_weight_mask(const SchemeSpec& spec) {
  spec.validate();
  FitConfig cfg = spec.fit;
  cfg.constant_weights = true;
  const auto xs = abscissae(cfg.parity, spec.arity);
  const auto h = static_cast<std::size_t>(cfg.stencil_size());
  std::vector<Mask> out;
  for (double x : xs) out.push_back(Mask{x, std::vector<double>(h)});
  std::vector<double> impulse(h, 0.0);
  for (std::size_t k = 0; k < h; ++k) {
    impulse.assign(h, 0.0);
    impulse[k] = 1.0;
    const FitResult fit = irls_fit(impulse, cfg);
    for (auto& mask : out) mask.coeffs[k] = eval_poly(fit.beta, mask.abscissa);
  }
  return out;
}

}  // namespace l1subdiv

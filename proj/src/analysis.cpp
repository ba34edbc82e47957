#include "l1subdiv/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "l1subdiv/errors.hpp"

namespace l1subdiv {

LimitSamples LimitSamples::from_polygon(const ControlPolygon& polygon, std::size_t component, int arity) {
  if (component >= polygon.dim) throw InputError("component index out of range");
  LimitSamples out;
  out.level = polygon.level;
  out.arity = arity;
  out.params.resize(polygon.size());
  out.values.resize(polygon.size());
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    out.params[i] = polygon.param(i);
    out.values[i] = polygon.at(i, component);
  }
  return out;
}

namespace {

ControlPolygon impulse(int padding) {
  std::vector<double> v(static_cast<std::size_t>(2 * padding + 1), 0.0);
  v[static_cast<std::size_t>(padding)] = 1.0;
  return ControlPolygon::scalar(std::move(v), -static_cast<double>(padding), 1.0);
}

void check_padding(const SchemeSpec& spec, int padding) {
  if (padding < 4 * spec.fit.n) {
    throw InputError("padding " + std::to_string(padding) + " is below 4n = " +
                     std::to_string(4 * spec.fit.n) + "; boundary effects would reach the support");
  }
}

}  // namespace

LimitSamples basic_limit(const SchemeSpec& spec, int levels, int padding, const RefineOptions& options) {
  spec.validate();
  check_padding(spec, padding);
  SchemeSpec open = spec;
  open.boundary = BoundaryPolicy::shrink;
  return LimitSamples::from_polygon(subdivide(impulse(padding), open, levels, options), 0, spec.arity);
}

double support_width(const LimitSamples& samples, double tol) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < samples.values.size(); ++i) {
    if (std::abs(samples.values[i]) > tol) {
      if (!any) lo = samples.params[i];
      hi = samples.params[i];
      any = true;
    }
  }
  return any ? hi - lo : 0.0;
}

double limit_support_width(const LimitSamples& samples, double tol) {
  const double raw = support_width(samples, tol);
  if (samples.level <= 0) return raw;
  return raw / (1.0 - std::pow(static_cast<double>(samples.arity), -samples.level));
}

double overshoot(const LimitSamples& samples, double low, double high) {
  if (!(low < high)) throw ConfigError("overshoot needs low < high");
  if (samples.values.empty()) return 0.0;
  const auto [mn, mx] = std::minmax_element(samples.values.begin(), samples.values.end());
  return (std::max(0.0, *mx - high) + std::max(0.0, low - *mn)) / (high - low);
}

ReproductionError reproduction_error(const LimitSamples& samples,
                                     const std::function<double(double)>& reference) {
  ReproductionError e;
  if (samples.values.empty()) return e;
  double sq = 0.0;
  for (std::size_t i = 0; i < samples.values.size(); ++i) {
    const double d = std::abs(samples.values[i] - reference(samples.params[i]));
    e.max_abs = std::max(e.max_abs, d);
    sq += d * d;
  }
  e.rms = std::sqrt(sq / static_cast<double>(samples.values.size()));
  return e;
}

double interpolate(const LimitSamples& samples, double t) {
  const auto& p = samples.params;
  if (p.empty()) throw InputError("no samples to interpolate");
  if (t <= p.front()) return samples.values.front();
  if (t >= p.back()) return samples.values.back();
  const auto it = std::upper_bound(p.begin(), p.end(), t);
  const auto k = static_cast<std::size_t>(it - p.begin());
  if (p.size() < 4) {
    const double u = (t - p[k - 1]) / (p[k] - p[k - 1]);
    return (1.0 - u) * samples.values[k - 1] + u * samples.values[k];
  }
  // Cubic through the two samples on either side, shifted inwards at the ends.
  const std::size_t first = std::min(k < 2 ? 0 : k - 2, p.size() - 4);
  double sum = 0.0;
  for (std::size_t a = first; a < first + 4; ++a) {
    double basis = 1.0;
    for (std::size_t b = first; b < first + 4; ++b) {
      if (b != a) basis *= (t - p[b]) / (p[a] - p[b]);
    }
    sum += basis * samples.values[a];
  }
  return sum;
}

std::vector<double> level_differences(const SchemeSpec& spec, int levels, int padding,
                                      const RefineOptions& options) {
  spec.validate();
  check_padding(spec, padding);
  SchemeSpec open = spec;
  open.boundary = BoundaryPolicy::shrink;
  ControlPolygon current = impulse(padding);
  std::vector<double> out;
  for (int k = 0; k < levels; ++k) {
    ControlPolygon next = refine_once(current, open, options);
    const LimitSamples fine = LimitSamples::from_polygon(next, 0, spec.arity);
    double d = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      const double t = current.param(i);
      if (t < fine.params.front() || t > fine.params.back()) continue;
      d = std::max(d, std::abs(current.at(i) - interpolate(fine, t)));
    }
    out.push_back(d);
    current = std::move(next);
  }
  return out;
}

}  // namespace l1subdiv

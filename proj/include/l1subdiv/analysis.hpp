#pragma once

#include <functional>
#include <vector>

#include "l1subdiv/refine1d.hpp"

namespace l1subdiv {

/// Refined values with their parameters, as produced by a finite number of
/// subdivision steps.
struct LimitSamples {
  std::vector<double> params;
  std::vector<double> values;
  int level = 0;
  int arity = 2;

  static LimitSamples from_polygon(const ControlPolygon& polygon, std::size_t component = 0,
                                   int arity = 2);
};

/// Subdivides the unit impulse on [-padding, padding] for `levels` steps.
/// Throws InputError when padding < 4n.
LimitSamples basic_limit(const SchemeSpec& spec, int levels, int padding,
                         const RefineOptions& options = {});

/// Width of the smallest parameter interval outside which |value| <= tol,
/// measured directly on the samples.
double support_width(const LimitSamples& samples, double tol);

/// Support of the limit function estimated from level-k samples. For a
/// refinable function the level-k hull is the limit support shrunk by the
/// factor (1 - arity^-k), so the measured width is rescaled by its inverse.
/// At level 0 the raw width is returned.
double limit_support_width(const LimitSamples& samples, double tol);

/// Normalised excursion outside [low, high]:
/// (max(0, max v - high) + max(0, low - min v)) / (high - low).
double overshoot(const LimitSamples& samples, double low, double high);

struct ReproductionError {
  double max_abs = 0.0;
  double rms = 0.0;
};

ReproductionError reproduction_error(const LimitSamples& samples,
                                     const std::function<double(double)>& reference);

/// Local cubic interpolation of the samples at parameter t (exact for cubic
/// data); clamps to the end values outside the sampled range.
double interpolate(const LimitSamples& samples, double t);

/// Sup-norm distance between successive levels of the basic limit function,
/// level k against the cubic interpolant of level k + 1, for
/// k = 0 .. levels - 1.
std::vector<double> level_differences(const SchemeSpec& spec, int levels, int padding,
                                      const RefineOptions& options = {});

}  // namespace l1subdiv

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "l1subdiv/local_fit.hpp"

namespace l1subdiv {

enum class Topology { open, closed };

/// How stencils are completed near the ends of open data.
enum class BoundaryPolicy {
  shrink,    ///< only centers with a full stencil emit points
  periodic,  ///< indices wrap around
  mirror,    ///< indices reflect about the end points (end point not repeated)
};

std::string to_string(BoundaryPolicy policy);
BoundaryPolicy parse_boundary(const std::string& text);

/// Ordered control values at one refinement level. Points are stored
/// contiguously, `dim` components each. Point i sits at parameter
/// origin + i * spacing; the parameters are carried through refinement so
/// refined values can be compared against the generating function.
struct ControlPolygon {
  std::size_t dim = 1;
  std::vector<double> values;
  int level = 0;
  Topology topology = Topology::open;
  double origin = 0.0;
  double spacing = 1.0;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  double param(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  double at(std::size_t i, std::size_t component = 0) const { return values[i * dim + component]; }
  std::vector<double> component(std::size_t c) const;

  static ControlPolygon scalar(std::vector<double> values, double origin = 0.0, double spacing = 1.0);
};

struct SchemeSpec {
  FitConfig fit;
  int arity = 2;
  BoundaryPolicy boundary = BoundaryPolicy::shrink;

  void validate() const;
  /// Stencil length h of the scheme D_{h,d}.
  int points() const { return fit.stencil_size(); }
};

/// Builds the spec of D_{h,d}: even h gives n = h/2, odd h gives n = (h-1)/2.
SchemeSpec make_scheme(int points, int degree);

/// "D_{h,d}" label used in reports.
std::string scheme_name(const SchemeSpec& spec);

/// Per-point linear coefficients over a stencil, evaluated at one abscissa.
struct Mask {
  double abscissa = 0.0;
  std::vector<double> coeffs;

  double apply(std::span<const double> stencil) const;
  double sum() const;
};

/// Aggregated fit statistics of a refinement run.
struct RefineStats {
  std::size_t fits = 0;
  std::size_t iterations = 0;
  std::size_t converged = 0;
  std::size_t ill_conditioned = 0;

  void merge(const RefineStats& other);
};

struct RefineOptions {
  /// Worker threads for independent new points; 0 picks the hardware count.
  unsigned threads = 1;
  RefineStats* stats = nullptr;
};

/// Offsets of the new points relative to the stencil center, in units of the
/// current spacing.
std::vector<double> abscissae(Parity parity, int arity);

ControlPolygon refine_once(const ControlPolygon& polygon, const SchemeSpec& spec,
                           const RefineOptions& options = {});
ControlPolygon subdivide(const ControlPolygon& polygon, const SchemeSpec& spec, int levels,
                         const RefineOptions& options = {});

/// Linear-scheme masks transcribed from the closed-form rules for d = 1, one
/// per binary abscissa. The stencil length follows from the weight count.
std::vector<Mask> masks_d1_closed_form(std::span<const double> weights, Parity parity);
/// Same for d = 2.
std::vector<Mask> masks_d2_closed_form(std::span<const double> weights, Parity parity);

/// Mask the generic solver realises for the given weights: the coefficients
/// of f in eval_poly(wls_solve(f, w), x) for every scheme abscissa x.
std::vector<Mask> generic_masks(std::span<const double> weights, int degree, Parity parity,
                                int arity = 2);

/// Stationary masks of the scheme with all weights frozen at one, extracted
/// by running the fit on unit impulses.
std::vector<Mask> constant_weight_mask(const SchemeSpec& spec);

}  // namespace l1subdiv

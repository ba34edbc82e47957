#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "l1subdiv/refine1d.hpp"

namespace l1subdiv {

/// Rectangular grid of control values, `dim` components per node, row-major
/// with the first axis (i, paired with the stencil offset r) as the slow one.
struct GridMesh {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t dim = 1;
  std::vector<double> values;
  int level = 0;
  std::array<Topology, 2> topology{Topology::open, Topology::open};
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> spacing{1.0, 1.0};

  double at(std::size_t i, std::size_t j, std::size_t c = 0) const {
    return values[(i * cols + j) * dim + c];
  }
  double& at(std::size_t i, std::size_t j, std::size_t c = 0) { return values[(i * cols + j) * dim + c]; }
  double param(int axis, std::size_t k) const {
    return origin[static_cast<std::size_t>(axis)] + static_cast<double>(k) * spacing[static_cast<std::size_t>(axis)];
  }

  GridMesh component(std::size_t c) const;
  GridMesh transposed() const;
};

struct SchemeSpec2D {
  FitConfig fit;
  std::array<BoundaryPolicy, 2> boundary{BoundaryPolicy::shrink, BoundaryPolicy::shrink};

  void validate() const;
};

/// Evaluation points (r, s) of the four new nodes produced per stencil, in
/// the order (lo, lo), (hi, lo), (lo, hi), (hi, hi).
std::vector<std::array<double, 2>> abscissae_2d(Parity parity);

GridMesh refine_once_2d(const GridMesh& mesh, const SchemeSpec2D& spec, const RefineOptions& options = {});
GridMesh subdivide_2d(const GridMesh& mesh, const SchemeSpec2D& spec, int levels,
                      const RefineOptions& options = {});

}  // namespace l1subdiv

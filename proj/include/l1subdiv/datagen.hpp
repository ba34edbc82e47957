#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "l1subdiv/refine1d.hpp"
#include "l1subdiv/refine2d.hpp"

namespace l1subdiv {

/// Identifier of the noise generator: 64-bit Mersenne Twister (std::mt19937_64,
/// default seeding by the 64-bit seed), uniforms from the top 53 bits of each
/// draw, Gaussians by the Box-Muller cosine branch using two fresh uniforms
/// per sample. Everything but mt19937_64 is implemented here, so the stream is
/// identical on every conforming platform.
inline constexpr const char* kRngAlgorithm = "mt19937_64/box-muller-cos/v1";

/// Test functions g1..g6 of the experiments (g4 is the unit step scaled to +-10).
std::function<double(double)> test_function(const std::string& name);
std::vector<std::string> test_function_names();

/// `count` uniform samples of the named function on [a, b].
ControlPolygon sample_function(const std::string& name, double a, double b, int count);

/// Closed grid of torus points (x, y, z) with nu1 along rows and nu2 along
/// columns, both sampled at 2 pi k / res without repeating the seam.
GridMesh torus_grid(double c1, double c2, int res1, int res2);

/// Analytic torus point for the parameters (nu1, nu2).
std::array<double, 3> torus_point(double c1, double c2, double nu1, double nu2);

struct Outlier {
  std::size_t i = 0;
  std::size_t j = 0;  ///< column for meshes; ignored for polygons
  double offset = 0.0;
};

/// Gaussian noise followed by outlier offsets. Outlier offsets are added to
/// every component of the addressed point.
struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<Outlier> outliers;

  void validate() const;
};

ControlPolygon add_noise(const ControlPolygon& data, const NoiseSpec& spec);
GridMesh add_noise(const GridMesh& data, const NoiseSpec& spec);

/// The Gaussian stream used by add_noise, exposed for reproducibility tests.
std::vector<double> gaussian_stream(std::uint64_t seed, std::size_t count);

}  // namespace l1subdiv

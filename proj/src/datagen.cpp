#include "l1subdiv/datagen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "l1subdiv/errors.hpp"

namespace l1subdiv {

std::function<double(double)> test_function(const std::string& name) {
  if (name == "g1") return [](double x) { return x * x - 5.0 * x + 3.0; };
  if (name == "g2") return [](double x) { return x * x * x - x * x - 5.0 * x + 3.0; };
  if (name == "g3") return [](double x) { return 0.7670 * std::exp(0.4040 * x); };
  if (name == "g4") return [](double x) { return x <= 0.0 ? -10.0 : 10.0; };
  if (name == "g5") {
    return [](double x) {
      const double u = x / 40.0 - 1.0;
      return u * u * u + std::cos(2.0 * x / 5.0);
    };
  }
  if (name == "g6") return [](double x) { return std::exp(-x / 3.0) * std::sin(3.0 * x); };
  throw InputError("unknown function '" + name + "' (expected g1..g6)");
}

std::vector<std::string> test_function_names() { return {"g1", "g2", "g3", "g4", "g5", "g6"}; }

ControlPolygon sample_function(const std::string& name, double a, double b, int count) {
  const auto g = test_function(name);
  if (count < 2) throw InputError("need at least two samples");
  if (!(a < b)) throw InputError("domain must satisfy a < b");
  const double h = (b - a) / (count - 1);
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = g(a + k * h);
  return ControlPolygon::scalar(std::move(v), a, h);
}

std::array<double, 3> torus_point(double c1, double c2, double nu1, double nu2) {
  const double ring = c2 + c1 * std::cos(nu2);
  return {ring * std::cos(nu1), ring * std::sin(nu1), c1 * std::sin(nu2)};
}

GridMesh torus_grid(double c1, double c2, int res1, int res2) {
  if (!(c1 > 0.0) || !(c2 > c1)) throw InputError("torus radii must satisfy c2 > c1 > 0");
  if (res1 < 3 || res2 < 3) throw InputError("torus resolution must be at least 3 x 3");
  GridMesh m;
  m.rows = static_cast<std::size_t>(res1);
  m.cols = static_cast<std::size_t>(res2);
  m.dim = 3;
  m.topology = {Topology::closed, Topology::closed};
  m.spacing = {2.0 * std::numbers::pi / res1, 2.0 * std::numbers::pi / res2};
  m.values.resize(m.rows * m.cols * 3);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      const auto p = torus_point(c1, c2, m.param(0, i), m.param(1, j));
      for (std::size_t c = 0; c < 3; ++c) m.at(i, j, c) = p[c];
    }
  }
  return m;
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("noise sigma must be >= 0");
}

std::vector<double> gaussian_stream(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 engine(seed);
  auto uniform = [&engine] {
    // (0, 1]: avoids log(0) in Box-Muller.
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
  };
  std::vector<double> out(count);
  for (auto& z : out) {
    const double u1 = uniform();
    const double u2 = uniform();
    z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  return out;
}

ControlPolygon add_noise(const ControlPolygon& data, const NoiseSpec& spec) {
  spec.validate();
  for (const auto& o : spec.outliers) {
    if (o.i >= data.size()) throw InputError("outlier index " + std::to_string(o.i) + " out of range");
  }
  ControlPolygon out = data;
  if (spec.sigma > 0.0) {
    const auto z = gaussian_stream(spec.seed, out.values.size());
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += spec.sigma * z[k];
  }
  for (const auto& o : spec.outliers) {
    for (std::size_t c = 0; c < out.dim; ++c) out.values[o.i * out.dim + c] += o.offset;
  }
  return out;
}

GridMesh add_noise(const GridMesh& data, const NoiseSpec& spec) {
  spec.validate();
  for (const auto& o : spec.outliers) {
    if (o.i >= data.rows || o.j >= data.cols) {
      throw InputError("outlier node (" + std::to_string(o.i) + ", " + std::to_string(o.j) + ") out of range");
    }
  }
  GridMesh out = data;
  if (spec.sigma > 0.0) {
    const auto z = gaussian_stream(spec.seed, out.values.size());
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += spec.sigma * z[k];
  }
  for (const auto& o : spec.outliers) {
    for (std::size_t c = 0; c < out.dim; ++c) out.at(o.i, o.j, c) += o.offset;
  }
  return out;
}

}  // namespace l1subdiv

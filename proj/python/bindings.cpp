#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "l1subdiv/analysis.hpp"
#include "l1subdiv/datagen.hpp"
#include "l1subdiv/errors.hpp"
#include "l1subdiv/experiments.hpp"
#include "l1subdiv/local_fit.hpp"
#include "l1subdiv/refine1d.hpp"
#include "l1subdiv/refine2d.hpp"

namespace py = pybind11;
using namespace l1subdiv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

FitConfig fit_config(int degree, Parity parity, int n, double delta, double epsilon, int max_iters) {
  FitConfig c;
  c.degree = degree;
  c.parity = parity;
  c.n = n;
  c.delta = delta;
  c.epsilon = epsilon;
  c.max_iters = max_iters;
  c.validate();
  return c;
}

SchemeSpec scheme(int points, int degree, int arity, const std::string& boundary, double delta, double epsilon,
                  int max_iters, bool constant_weights) {
  auto s = make_scheme(points, degree);
  s.arity = arity;
  s.boundary = parse_boundary(boundary);
  s.fit.delta = delta;
  s.fit.epsilon = epsilon;
  s.fit.max_iters = max_iters;
  s.fit.constant_weights = constant_weights;
  s.validate();
  return s;
}

template <class Result>
py::dict fit_dict(const Result& r) {
  py::dict d;
  d["beta"] = r.beta.coeffs;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["weights"] = r.final_weights;
  d["objective_trace"] = r.objective_trace;
  d["ill_conditioned"] = r.ill_conditioned;
  return d;
}

py::dict stats_dict(const RefineStats& s) {
  py::dict d;
  d["fits"] = s.fits;
  d["iterations"] = s.iterations;
  d["converged"] = s.converged;
  d["ill_conditioned"] = s.ill_conditioned;
  return d;
}

Array polygon_values(const ControlPolygon& p) {
  if (p.dim == 1) return Array(static_cast<py::ssize_t>(p.size()), p.values.data());
  return Array({static_cast<py::ssize_t>(p.size()), static_cast<py::ssize_t>(p.dim)}, p.values.data());
}

py::dict limit_dict(const LimitSamples& s) {
  py::dict d;
  d["params"] = Array(static_cast<py::ssize_t>(s.params.size()), s.params.data());
  d["values"] = Array(static_cast<py::ssize_t>(s.values.size()), s.values.data());
  return d;
}

py::dict irls_fit_py(const Array& stencil, int degree, double delta, double epsilon, int max_iters) {
  const auto buf = stencil.request();
  const double* data = static_cast<const double*>(buf.ptr);
  if (buf.ndim == 1) {
    const auto len = static_cast<int>(buf.shape[0]);
    const auto cfg = fit_config(degree, len % 2 == 0 ? Parity::even : Parity::odd, len / 2, delta, epsilon, max_iters);
    return fit_dict(irls_fit(std::span<const double>(data, static_cast<std::size_t>(len)), cfg));
  }
  if (buf.ndim == 2 && buf.shape[0] == buf.shape[1]) {
    const auto side = static_cast<int>(buf.shape[0]);
    const auto cfg = fit_config(degree, side % 2 == 0 ? Parity::even : Parity::odd, side / 2, delta, epsilon, max_iters);
    return fit_dict(irls_fit_2d(std::span<const double>(data, static_cast<std::size_t>(side * side)), cfg));
  }
  throw InputError("stencil must be a vector or a square matrix");
}

py::dict subdivide_py(const Array& values, int points, int degree, int levels, int arity, const std::string& boundary,
                      double delta, double epsilon, int max_iters, bool constant_weights, double origin,
                      double spacing, bool closed, unsigned threads) {
  const auto buf = values.request();
  if (buf.ndim != 1 && buf.ndim != 2) throw InputError("values must have shape (n,) or (n, dim)");
  ControlPolygon p;
  p.dim = buf.ndim == 1 ? 1 : static_cast<std::size_t>(buf.shape[1]);
  const auto* data = static_cast<const double*>(buf.ptr);
  p.values.assign(data, data + buf.size);
  p.origin = origin;
  p.spacing = spacing;
  p.topology = closed ? Topology::closed : Topology::open;
  const auto spec = scheme(points, degree, arity, boundary, delta, epsilon, max_iters, constant_weights);
  RefineStats stats;
  RefineOptions opt;
  opt.threads = threads;
  opt.stats = &stats;
  ControlPolygon out;
  {
    py::gil_scoped_release release;
    out = subdivide(p, spec, levels, opt);
  }
  py::dict d;
  std::vector<double> params(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) params[i] = out.param(i);
  d["params"] = Array(static_cast<py::ssize_t>(params.size()), params.data());
  d["values"] = polygon_values(out);
  d["stats"] = stats_dict(stats);
  return d;
}

Array subdivide_surface_py(const Array& grid, int points, int degree, int levels, std::pair<bool, bool> closed,
                           double delta, double epsilon, int max_iters, bool constant_weights, unsigned threads) {
  const auto buf = grid.request();
  if (buf.ndim != 2 && buf.ndim != 3) throw InputError("grid must have shape (rows, cols) or (rows, cols, dim)");
  GridMesh m;
  m.rows = static_cast<std::size_t>(buf.shape[0]);
  m.cols = static_cast<std::size_t>(buf.shape[1]);
  m.dim = buf.ndim == 2 ? 1 : static_cast<std::size_t>(buf.shape[2]);
  const auto* data = static_cast<const double*>(buf.ptr);
  m.values.assign(data, data + buf.size);
  m.topology = {closed.first ? Topology::closed : Topology::open, closed.second ? Topology::closed : Topology::open};
  SchemeSpec2D spec;
  spec.fit = fit_config(degree, points % 2 == 0 ? Parity::even : Parity::odd, points / 2, delta, epsilon, max_iters);
  spec.fit.constant_weights = constant_weights;
  spec.boundary = {closed.first ? BoundaryPolicy::periodic : BoundaryPolicy::shrink,
                   closed.second ? BoundaryPolicy::periodic : BoundaryPolicy::shrink};
  RefineOptions opt;
  opt.threads = threads;
  GridMesh out;
  {
    py::gil_scoped_release release;
    out = subdivide_2d(m, spec, levels, opt);
  }
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(out.rows), static_cast<py::ssize_t>(out.cols)};
  if (buf.ndim == 3) shape.push_back(static_cast<py::ssize_t>(out.dim));
  return Array(shape, out.values.data());
}

py::dict basic_limit_py(int points, int degree, int levels, std::optional<int> padding, int arity, double tol) {
  auto spec = make_scheme(points, degree);
  spec.arity = arity;
  const auto s = basic_limit(spec, levels, padding.value_or(4 * (points / 2) + 4));
  auto d = limit_dict(s);
  d["support_raw"] = support_width(s, tol);
  d["support"] = limit_support_width(s, tol);
  return d;
}

std::string run_experiment_py(const std::string& name_or_json, std::optional<std::uint64_t> seed,
                              std::optional<std::string> output, unsigned threads) {
  auto m = name_or_json.find('{') == std::string::npos ? builtin_manifest(name_or_json)
                                                      : manifest_from_json(name_or_json);
  if (seed) m.seed = *seed;
  ExperimentResult r;
  {
    py::gil_scoped_release release;
    r = run_experiment(m, threads);
    if (output) write_experiment(r, *output);
  }
  return r.metrics_json();
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Robust subdivision by smoothed l1 local polynomial fitting";

  auto error = py::register_exception<Error>(mod, "Error", PyExc_ValueError);
  py::register_exception<ConfigError>(mod, "ConfigError", error.ptr());
  py::register_exception<InputError>(mod, "InputError", error.ptr());
  py::register_exception<DomainError>(mod, "DomainError", error.ptr());
  py::register_exception<UnsupportedError>(mod, "UnsupportedError", error.ptr());
  py::register_exception<NumericalError>(mod, "NumericalError", error.ptr());

  mod.def("irls_fit", &irls_fit_py, py::arg("stencil"), py::arg("degree"), py::arg("delta") = 1e-4,
          py::arg("epsilon") = 1e-6, py::arg("max_iters") = 6,
          "Smoothed l1 fit of a local polynomial to a stencil (vector or square matrix).");
  mod.def("subdivide", &subdivide_py, py::arg("values"), py::arg("points"), py::arg("degree"), py::arg("levels"),
          py::arg("arity") = 2, py::arg("boundary") = "shrink", py::arg("delta") = 1e-4, py::arg("epsilon") = 1e-6,
          py::arg("max_iters") = 6, py::arg("constant_weights") = false, py::arg("origin") = 0.0,
          py::arg("spacing") = 1.0, py::arg("closed") = false, py::arg("threads") = 1);
  mod.def("subdivide_surface", &subdivide_surface_py, py::arg("grid"), py::arg("points"), py::arg("degree"),
          py::arg("levels"), py::arg("closed") = std::pair<bool, bool>{false, false}, py::arg("delta") = 1e-4,
          py::arg("epsilon") = 1e-6, py::arg("max_iters") = 6, py::arg("constant_weights") = false,
          py::arg("threads") = 1);
  mod.def("basic_limit", &basic_limit_py, py::arg("points"), py::arg("degree"), py::arg("levels"),
          py::arg("padding") = py::none(), py::arg("arity") = 2, py::arg("tol") = 1e-12);
  mod.def(
      "sample_function",
      [](const std::string& name, double a, double b, int count) {
        const auto p = sample_function(name, a, b, count);
        std::vector<double> params(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) params[i] = p.param(i);
        return py::make_tuple(Array(static_cast<py::ssize_t>(params.size()), params.data()), polygon_values(p));
      },
      py::arg("name"), py::arg("a"), py::arg("b"), py::arg("count"));
  mod.def(
      "torus_grid",
      [](double c1, double c2, int res1, int res2) {
        const auto g = torus_grid(c1, c2, res1, res2);
        return Array({static_cast<py::ssize_t>(g.rows), static_cast<py::ssize_t>(g.cols), py::ssize_t{3}},
                     g.values.data());
      },
      py::arg("c1") = 2.0, py::arg("c2") = 5.0, py::arg("res1") = 24, py::arg("res2") = 24);
  mod.def("test_functions", &test_function_names);
  mod.def("builtin_experiments", &builtin_manifest_names);
  mod.def(
      "experiment_manifest", [](const std::string& name) { return manifest_to_json(builtin_manifest(name)); },
      py::arg("name"));
  mod.def("run_experiment", &run_experiment_py, py::arg("manifest"), py::arg("seed") = py::none(),
          py::arg("output") = py::none(), py::arg("threads") = 1);
}

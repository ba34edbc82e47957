#include "l1subdiv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "l1subdiv/errors.hpp"
#include "l1subdiv/io.hpp"

namespace l1subdiv {

using nlohmann::ordered_json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::curve: return "curve";
    case ExperimentKind::surface: return "surface";
    case ExperimentKind::limit: return "limit";
  }
  return "curve";
}

ExperimentKind parse_kind(const std::string& text) {
  if (text == "curve") return ExperimentKind::curve;
  if (text == "surface") return ExperimentKind::surface;
  if (text == "limit") return ExperimentKind::limit;
  throw ConfigError("unknown experiment kind '" + text + "' (expected curve, surface or limit)");
}

void ExperimentManifest::validate() const {
  if (name.empty()) throw ConfigError("manifest needs a name");
  if (schemes.empty()) throw ConfigError("manifest '" + name + "' lists no schemes");
  if (levels < 0) throw ConfigError("levels must be >= 0");
  if (rng != kRngAlgorithm) {
    throw ConfigError("manifest uses RNG '" + rng + "', this build provides '" + kRngAlgorithm + "'");
  }
  for (const auto& s : schemes) {
    SchemeSpec spec = make_scheme(s.points, s.degree);
    spec.arity = arity;
    spec.boundary = boundary;
    spec.fit.delta = delta;
    spec.fit.epsilon = epsilon;
    spec.fit.max_iters = max_iters;
    if (kind == ExperimentKind::surface) {
      spec.fit.validate(2);
      if (arity != 2) throw UnsupportedError("surface schemes are binary");
    } else {
      spec.validate();
    }
  }
  if (kind == ExperimentKind::curve && input.empty()) {
    test_function(function);
    if (samples < 2) throw ConfigError("manifest '" + name + "' needs at least two samples");
    if (!(domain_a < domain_b)) throw ConfigError("domain must satisfy a < b");
  }
  NoiseSpec{noise_sigma, seed, outliers}.validate();
}

namespace {

ordered_json scheme_json(const SchemeEntry& s) { return {{"points", s.points}, {"degree", s.degree}}; }

template <class T>
T get_or(const ordered_json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string manifest_to_json(const ExperimentManifest& m) {
  ordered_json j;
  j["name"] = m.name;
  j["kind"] = to_string(m.kind);
  j["schemes"] = ordered_json::array();
  for (const auto& s : m.schemes) j["schemes"].push_back(scheme_json(s));
  j["arity"] = m.arity;
  j["delta"] = m.delta;
  j["epsilon"] = m.epsilon;
  j["max_iters"] = m.max_iters;
  j["boundary"] = to_string(m.boundary);
  j["function"] = m.function;
  j["domain"] = {m.domain_a, m.domain_b};
  j["samples"] = m.samples;
  j["input"] = m.input;
  j["torus"] = {{"c1", m.torus_c1}, {"c2", m.torus_c2}, {"res", m.torus_res}};
  ordered_json noise;
  noise["sigma"] = m.noise_sigma;
  noise["seed"] = m.seed;
  noise["rng"] = m.rng;
  noise["outliers"] = ordered_json::array();
  for (const auto& o : m.outliers) noise["outliers"].push_back({{"i", o.i}, {"j", o.j}, {"offset", o.offset}});
  j["noise"] = noise;
  j["levels"] = m.levels;
  j["compare_constant_weights"] = m.compare_constant_weights;
  j["padding"] = m.padding;
  j["support_tol"] = m.support_tol;
  j["output"] = m.output;
  return j.dump(2) + "\n";
}

ExperimentManifest manifest_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("manifest is not valid JSON: ") + e.what());
  }
  ExperimentManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.kind = parse_kind(get_or<std::string>(j, "kind", "curve"));
    for (const auto& s : j.at("schemes")) {
      m.schemes.push_back({s.at("points").get<int>(), s.at("degree").get<int>()});
    }
    m.arity = get_or(j, "arity", m.arity);
    m.delta = get_or(j, "delta", m.delta);
    m.epsilon = get_or(j, "epsilon", m.epsilon);
    m.max_iters = get_or(j, "max_iters", m.max_iters);
    m.boundary = parse_boundary(get_or<std::string>(j, "boundary", "shrink"));
    m.function = get_or<std::string>(j, "function", "");
    if (j.contains("domain")) {
      m.domain_a = j.at("domain").at(0).get<double>();
      m.domain_b = j.at("domain").at(1).get<double>();
    }
    m.samples = get_or(j, "samples", m.samples);
    m.input = get_or<std::string>(j, "input", "");
    if (j.contains("torus")) {
      const auto& t = j.at("torus");
      m.torus_c1 = get_or(t, "c1", m.torus_c1);
      m.torus_c2 = get_or(t, "c2", m.torus_c2);
      m.torus_res = get_or(t, "res", m.torus_res);
    }
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      m.noise_sigma = get_or(n, "sigma", 0.0);
      m.seed = get_or<std::uint64_t>(n, "seed", 0);
      m.rng = get_or<std::string>(n, "rng", kRngAlgorithm);
      if (n.contains("outliers")) {
        for (const auto& o : n.at("outliers")) {
          m.outliers.push_back({o.at("i").get<std::size_t>(), get_or<std::size_t>(o, "j", 0),
                                o.at("offset").get<double>()});
        }
      }
    }
    m.levels = get_or(j, "levels", m.levels);
    m.compare_constant_weights = get_or(j, "compare_constant_weights", false);
    m.padding = get_or(j, "padding", 0);
    m.support_tol = get_or(j, "support_tol", m.support_tol);
    m.output = get_or<std::string>(j, "output", "");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  m.validate();
  return m;
}

ExperimentManifest read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

std::vector<std::string> builtin_manifest_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "torus"};
}

namespace {

std::vector<SchemeEntry> pair_family(int even_points, std::initializer_list<int> degrees) {
  std::vector<SchemeEntry> out;
  for (int h : {even_points, even_points + 1}) {
    for (int d : degrees) out.push_back({h, d});
  }
  return out;
}

ExperimentManifest curve_manifest(const std::string& name, const std::string& fn, double a, double b,
                                  int samples, std::vector<SchemeEntry> schemes, int levels) {
  ExperimentManifest m;
  m.name = name;
  m.kind = ExperimentKind::curve;
  m.function = fn;
  m.domain_a = a;
  m.domain_b = b;
  m.samples = samples;
  m.schemes = std::move(schemes);
  m.levels = levels;
  return m;
}

}  // namespace

ExperimentManifest builtin_manifest(const std::string& name) {
  if (name == "fig2") {
    ExperimentManifest m;
    m.name = name;
    m.kind = ExperimentKind::limit;
    for (int h : {10, 11, 12, 13}) {
      for (int d : {1, 2, 3}) m.schemes.push_back({h, d});
    }
    m.levels = 6;
    return m;
  }
  if (name == "fig3") return curve_manifest(name, "g1", -2.0, 7.0, 30, pair_family(10, {1, 2, 3}), 5);
  if (name == "fig4") return curve_manifest(name, "g2", -3.0, 3.0, 30, pair_family(10, {1, 2, 3}), 5);
  if (name == "fig5") return curve_manifest(name, "g3", -5.0, 5.0, 30, pair_family(10, {1, 2, 3}), 5);
  if (name == "fig6") return curve_manifest(name, "g4", -15.5, 15.5, 32, pair_family(12, {1, 2, 3}), 4);
  if (name == "fig7") return curve_manifest(name, "g5", 0.0, 80.0, 81, pair_family(15, {1, 2, 3}), 4);
  if (name == "fig8") {
    auto m = curve_manifest(name, "g5", 0.0, 80.0, 81, pair_family(15, {1, 2, 3}), 4);
    // Twelve isolated spikes, alternating sign, spread over the interior.
    for (int k = 0; k < 12; ++k) {
      m.outliers.push_back({static_cast<std::size_t>(7 + 6 * k), 0, k % 2 == 0 ? 1.5 : -1.5});
    }
    m.compare_constant_weights = true;
    return m;
  }
  if (name == "fig9") {
    const double b = 3.0 * std::numbers::pi;
    auto m = curve_manifest(name, "g6", 0.0, b, 60, pair_family(19, {1, 2, 3}), 4);
    const auto clean = sample_function("g6", 0.0, b, 60);
    double amp = 0.0;
    for (double v : clean.values) amp = std::max(amp, std::abs(v));
    m.noise_sigma = 0.15 * amp;
    m.outliers = {{20, 0, 5.0 * m.noise_sigma}, {40, 0, -5.0 * m.noise_sigma}};
    m.compare_constant_weights = true;
    return m;
  }
  if (name == "torus") {
    ExperimentManifest m;
    m.name = name;
    m.kind = ExperimentKind::surface;
    m.function = "torus";
    m.schemes = {{4, 1}, {4, 2}};
    m.levels = 2;
    m.noise_sigma = 0.05;
    m.outliers = {{3, 5, 0.8}, {15, 17, -0.8}, {20, 2, 0.8}};
    m.compare_constant_weights = true;
    return m;
  }
  std::string list;
  for (const auto& n : builtin_manifest_names()) list += (list.empty() ? "" : ", ") + n;
  throw InputError("unknown experiment '" + name + "'; available: " + list);
}

namespace {

std::string tag(const SchemeEntry& s) { return "D" + std::to_string(s.points) + "_" + std::to_string(s.degree); }

SchemeSpec scheme_for(const ExperimentManifest& m, const SchemeEntry& s, bool constant) {
  SchemeSpec spec = make_scheme(s.points, s.degree);
  spec.arity = m.arity;
  spec.boundary = m.boundary;
  spec.fit.delta = m.delta;
  spec.fit.epsilon = m.epsilon;
  spec.fit.max_iters = m.max_iters;
  spec.fit.constant_weights = constant;
  return spec;
}

std::string to_text(const CsvTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

std::string to_text(const GridMesh& mesh) {
  std::ostringstream os;
  write_mesh(os, mesh);
  return os.str();
}

ReproductionError error_against(const ControlPolygon& p, const std::function<double(double)>& f) {
  return reproduction_error(LimitSamples::from_polygon(p, 0, 2), f);
}

ReproductionError torus_error(const GridMesh& mesh, double c1, double c2) {
  ReproductionError e;
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.rows; ++i) {
    for (std::size_t j = 0; j < mesh.cols; ++j) {
      const auto ref = torus_point(c1, c2, mesh.param(0, i), mesh.param(1, j));
      double d2 = 0.0;
      for (std::size_t c = 0; c < 3; ++c) d2 += (mesh.at(i, j, c) - ref[c]) * (mesh.at(i, j, c) - ref[c]);
      e.max_abs = std::max(e.max_abs, std::sqrt(d2));
      sum += d2;
    }
  }
  const double count = static_cast<double>(mesh.rows * mesh.cols);
  e.rms = count > 0 ? std::sqrt(sum / count) : 0.0;
  return e;
}

/// Largest deviation of the refined curve, read at the original sample
/// parameters, from the data it was built from.
double interpolation_gap(const ControlPolygon& data, const ControlPolygon& refined) {
  const auto s = LimitSamples::from_polygon(refined, 0, 2);
  const double lo = s.params.front(), hi = s.params.back();
  double gap = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double t = data.param(i);
    if (t < lo - 1e-12 || t > hi + 1e-12) continue;
    gap = std::max(gap, std::abs(interpolate(s, t) - data.at(i)));
  }
  return gap;
}

void run_curve(const ExperimentManifest& m, unsigned threads, ExperimentResult& r) {
  ControlPolygon clean;
  std::function<double(double)> reference;
  if (!m.input.empty()) {
    clean = polygon_from_table(read_csv_file(m.input));
  } else {
    clean = sample_function(m.function, m.domain_a, m.domain_b, m.samples);
    reference = test_function(m.function);
  }
  const ControlPolygon data = add_noise(clean, {m.noise_sigma, m.seed, m.outliers});
  r.artifacts["input.csv"] = to_text(curve_table(data));
  if (reference && (m.noise_sigma > 0.0 || !m.outliers.empty())) {
    r.input_to_clean = error_against(data, reference);
  }
  double low = clean.values.front(), high = clean.values.front();
  for (double v : clean.values) {
    low = std::min(low, v);
    high = std::max(high, v);
  }
  for (const auto& entry : m.schemes) {
    SchemeMetrics sm;
    sm.points = entry.points;
    sm.degree = entry.degree;
    const SchemeSpec spec = scheme_for(m, entry, false);
    sm.scheme = scheme_name(spec);
    const ControlPolygon out = subdivide(data, spec, m.levels, {threads, &sm.stats});
    r.artifacts[tag(entry) + ".csv"] = to_text(curve_table(out));
    if (reference) sm.to_clean = error_against(out, reference);
    if (high > low && data.dim == 1) {
      sm.overshoot = overshoot(LimitSamples::from_polygon(out, 0, m.arity), low, high);
    }
    if (data.dim == 1) sm.interpolation_error = interpolation_gap(data, out);
    if (m.compare_constant_weights) {
      const ControlPolygon lin = subdivide(data, scheme_for(m, entry, true), m.levels, {threads, nullptr});
      r.artifacts[tag(entry) + "_constant.csv"] = to_text(curve_table(lin));
      if (reference) sm.constant_to_clean = error_against(lin, reference);
    }
    r.schemes.push_back(std::move(sm));
  }
}

void run_surface(const ExperimentManifest& m, unsigned threads, ExperimentResult& r) {
  GridMesh clean;
  const bool torus = m.input.empty();
  if (torus) {
    clean = torus_grid(m.torus_c1, m.torus_c2, m.torus_res, m.torus_res);
  } else {
    clean = mesh_from_table(read_csv_file(m.input));
  }
  const GridMesh data = add_noise(clean, {m.noise_sigma, m.seed, m.outliers});
  r.artifacts["input.obj"] = to_text(data);
  if (torus) r.input_to_clean = torus_error(data, m.torus_c1, m.torus_c2);
  for (const auto& entry : m.schemes) {
    SchemeMetrics sm;
    sm.points = entry.points;
    sm.degree = entry.degree;
    const SchemeSpec base = scheme_for(m, entry, false);
    sm.scheme = "D_{(" + std::to_string(entry.points) + ")^2," + std::to_string(entry.degree) + "}";
    SchemeSpec2D spec{base.fit, {m.boundary, m.boundary}};
    const GridMesh out = subdivide_2d(data, spec, m.levels, {threads, &sm.stats});
    r.artifacts[tag(entry) + ".obj"] = to_text(out);
    if (torus) sm.to_clean = torus_error(out, m.torus_c1, m.torus_c2);
    if (m.compare_constant_weights) {
      spec.fit.constant_weights = true;
      const GridMesh lin = subdivide_2d(data, spec, m.levels, {threads, nullptr});
      r.artifacts[tag(entry) + "_constant.obj"] = to_text(lin);
      if (torus) sm.constant_to_clean = torus_error(lin, m.torus_c1, m.torus_c2);
    }
    r.schemes.push_back(std::move(sm));
  }
}

void run_limit(const ExperimentManifest& m, unsigned threads, ExperimentResult& r) {
  for (const auto& entry : m.schemes) {
    SchemeMetrics sm;
    sm.points = entry.points;
    sm.degree = entry.degree;
    const SchemeSpec spec = scheme_for(m, entry, false);
    sm.scheme = scheme_name(spec);
    const int padding = m.padding > 0 ? m.padding : 4 * spec.fit.n + 4;
    const LimitSamples s = basic_limit(spec, m.levels, padding, {threads, &sm.stats});
    CsvTable t;
    t.columns = {"param", "value"};
    for (std::size_t i = 0; i < s.params.size(); ++i) t.rows.push_back({s.params[i], s.values[i]});
    r.artifacts[tag(entry) + ".csv"] = to_text(t);
    sm.support_raw = support_width(s, m.support_tol);
    sm.support = limit_support_width(s, m.support_tol);
    r.schemes.push_back(std::move(sm));
  }
}

ordered_json error_json(const std::optional<ReproductionError>& e) {
  if (!e) return nullptr;
  return {{"max_abs", e->max_abs}, {"rms", e->rms}};
}

template <class T>
ordered_json opt_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::string ExperimentResult::metrics_json() const {
  ordered_json j;
  j["experiment"] = manifest.name;
  j["kind"] = to_string(manifest.kind);
  j["levels"] = manifest.levels;
  j["seed"] = manifest.seed;
  j["rng"] = manifest.rng;
  j["input_to_clean"] = error_json(input_to_clean);
  j["schemes"] = ordered_json::array();
  for (const auto& s : schemes) {
    ordered_json e;
    e["scheme"] = s.scheme;
    e["points"] = s.points;
    e["degree"] = s.degree;
    e["to_clean"] = error_json(s.to_clean);
    e["constant_to_clean"] = error_json(s.constant_to_clean);
    e["overshoot"] = opt_json(s.overshoot);
    e["interpolation_error"] = opt_json(s.interpolation_error);
    e["support_raw"] = opt_json(s.support_raw);
    e["support"] = opt_json(s.support);
    e["stats"] = {{"fits", s.stats.fits},
                  {"iterations", s.stats.iterations},
                  {"converged", s.stats.converged},
                  {"ill_conditioned", s.stats.ill_conditioned}};
    j["schemes"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentManifest& manifest, unsigned threads) {
  manifest.validate();
  ExperimentResult r;
  r.manifest = manifest;
  switch (manifest.kind) {
    case ExperimentKind::curve: run_curve(manifest, threads, r); break;
    case ExperimentKind::surface: run_surface(manifest, threads, r); break;
    case ExperimentKind::limit: run_limit(manifest, threads, r); break;
  }
  return r;
}

void write_experiment(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& text) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
  };
  for (const auto& [name, text] : result.artifacts) put(name, text);
  put("metrics.json", result.metrics_json());
  put("manifest.json", manifest_to_json(result.manifest));
}

}  // namespace l1subdiv

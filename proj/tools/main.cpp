#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "l1subdiv/analysis.hpp"
#include "l1subdiv/datagen.hpp"
#include "l1subdiv/errors.hpp"
#include "l1subdiv/experiments.hpp"
#include "l1subdiv/io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace l1subdiv;

namespace {

struct Args {
  std::string input;
  std::string function;
  std::string domain = "0:1";
  int samples = 30;
  std::string scheme = "2n=4,d=1";
  int arity = 2;
  int levels = 4;
  double delta = 1e-4;
  double epsilon = 1e-6;
  int max_iters = 6;
  std::string boundary = "shrink";
  double noise_sigma = 0.0;
  std::string outliers;
  std::uint64_t seed = 0;
  std::string output = "out";
  std::string manifest;
  int padding = 0;
  double tol = 1e-12;
  bool require_convergence = false;
  std::string experiment;
};

unsigned thread_count() {
  const char* env = std::getenv("SUBDIV_L1_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw ConfigError(std::string("SUBDIV_L1_THREADS must be a count, got '") + env + "'");
  return static_cast<unsigned>(v);
}

/// "2n=10,d=3", "2n+1=11,d=2" or "h=10,d=1".
SchemeEntry parse_scheme(const std::string& text) {
  static const std::regex re(R"(^\s*(2n\+1|2n|h)\s*=\s*(\d+)\s*,\s*d\s*=\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) {
    throw ConfigError("bad --scheme '" + text + "' (expected e.g. 2n=10,d=3 or 2n+1=11,d=2)");
  }
  const int h = std::stoi(m[2]);
  if (m[1] == "2n" && h % 2 != 0) throw ConfigError("2n must be even in '" + text + "'");
  if (m[1] == "2n+1" && h % 2 != 1) throw ConfigError("2n+1 must be odd in '" + text + "'");
  return {h, std::stoi(m[3])};
}

std::pair<double, double> parse_domain(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("bad --domain '" + text + "' (expected a:b)");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad --domain '" + text + "' (expected a:b)");
  }
}

/// "i:off,..." for curves, "i:j:off,..." for grids.
std::vector<Outlier> parse_outliers(const std::string& text, bool grid) {
  std::vector<Outlier> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream is(item);
    std::string p;
    while (std::getline(is, p, ':')) parts.push_back(p);
    try {
      if (!grid && parts.size() == 2) {
        out.push_back({std::stoul(parts[0]), 0, std::stod(parts[1])});
        continue;
      }
      if (grid && parts.size() == 3) {
        out.push_back({std::stoul(parts[0]), std::stoul(parts[1]), std::stod(parts[2])});
        continue;
      }
    } catch (const std::exception&) {
    }
    throw ConfigError("bad outlier '" + item + "' (expected " + (grid ? "i:j:offset" : "i:offset") + ")");
  }
  return out;
}

SchemeSpec scheme_spec(const Args& a) {
  const auto e = parse_scheme(a.scheme);
  SchemeSpec spec = make_scheme(e.points, e.degree);
  spec.arity = a.arity;
  spec.boundary = parse_boundary(a.boundary);
  spec.fit.delta = a.delta;
  spec.fit.epsilon = a.epsilon;
  spec.fit.max_iters = a.max_iters;
  return spec;
}

ordered_json fit_json(const FitConfig& f) {
  return {{"degree", f.degree}, {"parity", to_string(f.parity)}, {"n", f.n},
          {"delta", f.delta},   {"epsilon", f.epsilon},          {"max_iters", f.max_iters}};
}

ordered_json stats_json(const RefineStats& s) {
  return {{"fits", s.fits}, {"iterations", s.iterations}, {"converged", s.converged},
          {"ill_conditioned", s.ill_conditioned}};
}

ordered_json source_json(const Args& a) {
  ordered_json j;
  if (!a.input.empty()) {
    j["input"] = a.input;
  } else {
    j["function"] = a.function;
    j["domain"] = a.domain;
    j["samples"] = a.samples;
  }
  j["noise"] = {{"sigma", a.noise_sigma}, {"seed", a.seed}, {"outliers", a.outliers}, {"rng", kRngAlgorithm}};
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

/// Collects warnings and decides the exit status of a refinement run.
struct Verdict {
  ordered_json warnings = ordered_json::array();
  bool failed = false;

  void check(const RefineStats& s, int level, bool require_convergence) {
    if (s.ill_conditioned > 0) {
      warnings.push_back("level " + std::to_string(level) + ": " + std::to_string(s.ill_conditioned) +
                         " ill-conditioned fits");
    }
    const std::size_t missed = s.fits - s.converged;
    if (missed > 0) {
      warnings.push_back("level " + std::to_string(level) + ": " + std::to_string(missed) +
                         " fits hit the iteration cap");
      if (require_convergence) failed = true;
    }
  }
};

int cmd_fit_curve(const Args& a, unsigned threads) {
  const SchemeSpec spec = scheme_spec(a);
  spec.validate();
  ControlPolygon clean;
  std::function<double(double)> reference;
  if (!a.input.empty()) {
    clean = polygon_from_table(read_csv_file(a.input));
  } else {
    if (a.function.empty()) throw ConfigError("fit-curve needs --input or --function");
    const auto [lo, hi] = parse_domain(a.domain);
    clean = sample_function(a.function, lo, hi, a.samples);
    reference = test_function(a.function);
  }
  ControlPolygon poly = add_noise(clean, {a.noise_sigma, a.seed, parse_outliers(a.outliers, false)});
  make_dir(a.output);

  ordered_json summary;
  summary["command"] = "fit-curve";
  summary["scheme"] = scheme_name(spec);
  summary["fit"] = fit_json(spec.fit);
  summary["arity"] = spec.arity;
  summary["boundary"] = to_string(spec.boundary);
  summary["levels"] = a.levels;
  summary["source"] = source_json(a);
  summary["threads"] = threads;
  summary["per_level"] = ordered_json::array();
  Verdict verdict;
  write_csv_file((fs::path(a.output) / "level_0.csv").string(), curve_table(poly));
  for (int k = 1; k <= a.levels; ++k) {
    RefineStats stats;
    poly = refine_once(poly, spec, {threads, &stats});
    write_csv_file((fs::path(a.output) / ("level_" + std::to_string(k) + ".csv")).string(), curve_table(poly));
    ordered_json lvl{{"level", k}, {"points", poly.size()}, {"stats", stats_json(stats)}};
    if (reference && poly.dim == 1) {
      const auto err = reproduction_error(LimitSamples::from_polygon(poly, 0, spec.arity), reference);
      lvl["to_clean"] = {{"max_abs", err.max_abs}, {"rms", err.rms}};
    }
    summary["per_level"].push_back(lvl);
    verdict.check(stats, k, a.require_convergence);
  }
  summary["warnings"] = verdict.warnings;
  write_text(fs::path(a.output) / "summary.json", summary.dump(2) + "\n");
  for (const auto& w : verdict.warnings) std::cerr << "warning: " << w.get<std::string>() << '\n';
  return verdict.failed ? 1 : 0;
}

int cmd_fit_surface(const Args& a, unsigned threads) {
  const SchemeSpec base = scheme_spec(a);
  SchemeSpec2D spec{base.fit, {base.boundary, base.boundary}};
  spec.validate();
  if (base.arity != 2) throw UnsupportedError("surface schemes are binary");
  GridMesh clean;
  bool torus = false;
  constexpr double c1 = 2.0, c2 = 5.0;
  if (!a.input.empty()) {
    clean = mesh_from_table(read_csv_file(a.input));
  } else if (a.function == "torus") {
    clean = torus_grid(c1, c2, a.samples, a.samples);
    torus = true;
  } else {
    throw ConfigError("fit-surface needs --input or --function torus");
  }
  GridMesh mesh = add_noise(clean, {a.noise_sigma, a.seed, parse_outliers(a.outliers, true)});
  make_dir(a.output);

  auto rms_to_torus = [&](const GridMesh& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t j = 0; j < m.cols; ++j) {
        const auto p = torus_point(c1, c2, m.param(0, i), m.param(1, j));
        for (std::size_t c = 0; c < 3; ++c) sum += (m.at(i, j, c) - p[c]) * (m.at(i, j, c) - p[c]);
      }
    }
    return std::sqrt(sum / static_cast<double>(m.rows * m.cols));
  };

  ordered_json summary;
  summary["command"] = "fit-surface";
  summary["fit"] = fit_json(spec.fit);
  summary["boundary"] = to_string(base.boundary);
  summary["levels"] = a.levels;
  summary["source"] = source_json(a);
  summary["threads"] = threads;
  if (torus) summary["torus"] = {{"c1", c1}, {"c2", c2}, {"res", a.samples}};
  summary["per_level"] = ordered_json::array();
  Verdict verdict;
  write_mesh_file((fs::path(a.output) / "level_0.obj").string(), mesh);
  if (torus) summary["input_rms_to_clean"] = rms_to_torus(mesh);
  for (int k = 1; k <= a.levels; ++k) {
    RefineStats stats;
    mesh = refine_once_2d(mesh, spec, {threads, &stats});
    write_mesh_file((fs::path(a.output) / ("level_" + std::to_string(k) + ".obj")).string(), mesh);
    ordered_json lvl{{"level", k}, {"rows", mesh.rows}, {"cols", mesh.cols}, {"stats", stats_json(stats)}};
    if (torus) lvl["rms_to_clean"] = rms_to_torus(mesh);
    summary["per_level"].push_back(lvl);
    verdict.check(stats, k, a.require_convergence);
  }
  summary["warnings"] = verdict.warnings;
  write_text(fs::path(a.output) / "summary.json", summary.dump(2) + "\n");
  for (const auto& w : verdict.warnings) std::cerr << "warning: " << w.get<std::string>() << '\n';
  return verdict.failed ? 1 : 0;
}

int cmd_basic_limit(const Args& a, unsigned threads) {
  SchemeSpec spec = scheme_spec(a);
  spec.boundary = BoundaryPolicy::shrink;
  spec.validate();
  const int padding = a.padding > 0 ? a.padding : 4 * spec.fit.n + 4;
  RefineStats stats;
  const auto s = basic_limit(spec, a.levels, padding, {threads, &stats});
  make_dir(a.output);
  CsvTable t;
  t.columns = {"param", "value"};
  for (std::size_t i = 0; i < s.params.size(); ++i) t.rows.push_back({s.params[i], s.values[i]});
  write_csv_file((fs::path(a.output) / "limit.csv").string(), t);
  ordered_json summary;
  summary["command"] = "basic-limit";
  summary["scheme"] = scheme_name(spec);
  summary["fit"] = fit_json(spec.fit);
  summary["levels"] = a.levels;
  summary["padding"] = padding;
  summary["tol"] = a.tol;
  summary["support_raw"] = support_width(s, a.tol);
  summary["support"] = limit_support_width(s, a.tol);
  summary["stats"] = stats_json(stats);
  write_text(fs::path(a.output) / "summary.json", summary.dump(2) + "\n");
  std::cout << scheme_name(spec) << " support " << summary["support"].get<double>() << '\n';
  return 0;
}

int cmd_experiment(const Args& a, unsigned threads, const std::function<bool(const char*)>& given) {
  ExperimentManifest m;
  if (!a.manifest.empty()) {
    m = read_manifest_file(a.manifest);
  } else if (!a.experiment.empty()) {
    m = builtin_manifest(a.experiment);
  } else {
    std::string list;
    for (const auto& n : builtin_manifest_names()) list += " " + n;
    throw ConfigError("experiment needs a name or --manifest; available:" + list);
  }
  if (given("--seed")) m.seed = a.seed;
  std::string out = m.output;
  if (given("--output") || out.empty()) out = (fs::path(a.output) / m.name).string();
  m.output = out;
  const auto result = run_experiment(m, threads);
  write_experiment(result, out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust l1 subdivision: curve and surface fitting, basic limit functions, experiments"};
  app.require_subcommand(1);
  Args a;

  auto add_scheme = [&](CLI::App* c) {
    c->add_option("--scheme", a.scheme, "scheme, e.g. 2n=10,d=3 or 2n+1=11,d=2");
    c->add_option("--arity", a.arity, "refinement arity");
    c->add_option("--levels", a.levels, "refinement levels")->check(CLI::NonNegativeNumber);
    c->add_option("--delta", a.delta, "smoothing of the absolute value");
    c->add_option("--epsilon", a.epsilon, "IRLS stopping tolerance");
    c->add_option("--max-iters", a.max_iters, "maximum reweighted solves per fit");
    c->add_option("--boundary", a.boundary, "shrink, periodic or mirror");
    c->add_option("--output", a.output, "output directory");
  };
  auto add_data = [&](CLI::App* c) {
    c->add_option("--input", a.input, "input CSV");
    c->add_option("--function", a.function, "generating function (g1..g6, or torus for surfaces)");
    c->add_option("--domain", a.domain, "sampling domain a:b");
    c->add_option("--samples", a.samples, "sample count (grid resolution for surfaces)");
    c->add_option("--noise-sigma", a.noise_sigma, "Gaussian noise level");
    c->add_option("--outliers", a.outliers, "outliers i:off,... (i:j:off for grids)");
    c->add_option("--seed", a.seed, "noise seed");
    c->add_flag("--require-convergence", a.require_convergence, "exit 1 when a fit hits the iteration cap");
  };

  auto* fit_curve = app.add_subcommand("fit-curve", "refine a sampled curve");
  add_scheme(fit_curve);
  add_data(fit_curve);
  auto* fit_surface = app.add_subcommand("fit-surface", "refine a grid mesh");
  add_scheme(fit_surface);
  add_data(fit_surface);
  auto* limit = app.add_subcommand("basic-limit", "subdivide the unit impulse");
  add_scheme(limit);
  limit->add_option("--padding", a.padding, "impulse half-width (default 4n+4)");
  limit->add_option("--tol", a.tol, "support threshold");
  auto* experiment = app.add_subcommand("experiment", "run a named or file manifest");
  experiment->add_option("name", a.experiment, "experiment name");
  experiment->add_option("--manifest", a.manifest, "manifest JSON file");
  experiment->add_option("--seed", a.seed, "override the manifest seed");
  experiment->add_option("--output", a.output, "output root directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const unsigned threads = thread_count();
    if (fit_curve->parsed()) return cmd_fit_curve(a, threads);
    if (fit_surface->parsed()) return cmd_fit_surface(a, threads);
    if (limit->parsed()) return cmd_basic_limit(a, threads);
    return cmd_experiment(a, threads, [&](const char* flag) { return experiment->count(flag) > 0; });
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

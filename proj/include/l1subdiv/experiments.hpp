#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l1subdiv/analysis.hpp"
#include "l1subdiv/datagen.hpp"
#include "l1subdiv/refine1d.hpp"
#include "l1subdiv/refine2d.hpp"

namespace l1subdiv {

enum class ExperimentKind { curve, surface, limit };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& text);

/// One scheme of a manifest: stencil length h and degree d of D_{h,d}.
/// Surfaces use h per axis.
struct SchemeEntry {
  int points = 10;
  int degree = 1;
};

/// Everything needed to rerun an experiment bit for bit.
struct ExperimentManifest {
  std::string name;
  ExperimentKind kind = ExperimentKind::curve;
  std::vector<SchemeEntry> schemes;
  int arity = 2;
  double delta = 1e-4;
  double epsilon = 1e-6;
  int max_iters = 6;
  BoundaryPolicy boundary = BoundaryPolicy::shrink;

  // Data source: a named function sampled on [domain_a, domain_b], a torus,
  // or an input file (CSV curve or grid table).
  std::string function;
  double domain_a = 0.0;
  double domain_b = 1.0;
  int samples = 0;
  std::string input;
  double torus_c1 = 2.0;
  double torus_c2 = 5.0;
  int torus_res = 24;

  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<Outlier> outliers;
  std::string rng = kRngAlgorithm;

  int levels = 4;
  bool compare_constant_weights = false;
  int padding = 0;             ///< limit experiments; 0 picks 4n + 4
  double support_tol = 1e-12;  ///< limit experiments
  std::string output;          ///< directory for artifacts

  void validate() const;
};

std::string manifest_to_json(const ExperimentManifest& manifest);
ExperimentManifest manifest_from_json(const std::string& text);
ExperimentManifest read_manifest_file(const std::string& path);

std::vector<std::string> builtin_manifest_names();
/// Throws InputError listing the available names for an unknown one.
ExperimentManifest builtin_manifest(const std::string& name);

struct SchemeMetrics {
  std::string scheme;
  int points = 0;
  int degree = 0;
  RefineStats stats;
  // Curves and surfaces with a known clean source.
  std::optional<ReproductionError> to_clean;
  std::optional<ReproductionError> constant_to_clean;
  // Curves only.
  std::optional<double> overshoot;
  std::optional<double> interpolation_error;
  // Limit experiments.
  std::optional<double> support_raw;
  std::optional<double> support;
};

struct ExperimentResult {
  ExperimentManifest manifest;
  std::optional<ReproductionError> input_to_clean;
  std::vector<SchemeMetrics> schemes;
  /// File name (relative to the output directory) to content.
  std::map<std::string, std::string> artifacts;

  std::string metrics_json() const;
};

/// Runs the manifest in memory. `threads` is passed to the refinement
/// drivers; results do not depend on it.
ExperimentResult run_experiment(const ExperimentManifest& manifest, unsigned threads = 1);

/// Writes every artifact plus metrics.json and manifest.json into `dir`,
/// creating it when needed.
void write_experiment(const ExperimentResult& result, const std::string& dir);

}  // namespace l1subdiv

#pragma once

// Experiment sweeps on top of the simulator: configuration files, named
// presets, per-run CSV series and the JSON manifest that indexes them.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "p2ptrust/metrics.hpp"
#include "p2ptrust/simulation.hpp"

namespace p2ptrust {

// An empty list means "use the base value".
struct SweepSpec {
  std::vector<double> alpha;
  std::vector<EstimatorKind> estimator_kind;
  std::vector<Population> population;
};

struct ExperimentSpec {
  SimConfig base;
  SweepSpec sweeps;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir{"out"};
  std::size_t max_runs = 64;
  unsigned jobs = 1;

  void validate() const;
  /// One SimConfig per (population, estimator, alpha, seed), in that nesting order.
  std::vector<SimConfig> expand() const;
};

inline constexpr std::string_view kCsvHeader = "iteration,delta_r_raw,delta_r_norm,utilization";
inline constexpr std::string_view kManifestName = "manifest.json";

/// "paper-homogeneous" or "paper-heterogeneous". Throws ConfigError otherwise.
ExperimentSpec preset(std::string_view name);
std::vector<std::string> preset_names();

/// Overlays the keys present in a JSON document onto spec. Unknown keys and
/// wrongly typed values raise ConfigError.
void overlay_config_text(ExperimentSpec& spec, std::string_view json_text);
void overlay_config_file(ExperimentSpec& spec, const std::filesystem::path& path);

/// Canonical JSON rendering of a configuration (sorted keys).
std::string config_to_json(const SimConfig& config);
/// 64-bit FNV-1a of config_to_json, as 16 hex digits.
std::string config_hash(const SimConfig& config);

/// Shortest round-trip decimal form; used for file names.
std::string format_shortest(double value);
/// 17 significant digits.
std::string format_exact(double value);

void emit_series(std::span<const IterationMetrics> rows, const std::filesystem::path& path);
inline void emit_series(const SimReport& report, const std::filesystem::path& path) {
  emit_series(report.metrics, path);
}
std::vector<IterationMetrics> parse_series(const std::filesystem::path& path);

struct ManifestEntry {
  std::string file;
  std::uint64_t seed = 0;
  EstimatorKind estimator = EstimatorKind::blue;
  double alpha = 0.0;
  Population population = Population::homogeneous;
  std::string config_hash;
};

std::string series_file_name(const SimConfig& config);

/// Runs every sweep point for every seed, writing one CSV per run plus the
/// manifest into spec.output_dir. Returns the manifest entries.
std::vector<ManifestEntry> run_experiment(const ExperimentSpec& spec);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace p2ptrust

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "m2m/config.hpp"
#include "m2m/metrics.hpp"

namespace m2m::io {

struct RunSpec {
  sim::SimConfig config;
  std::string sweep_variable = "none";
  double sweep_value = 0.0;
  std::string key;  // config hash and seed, unique within a manifest
};

struct RunManifest {
  std::vector<RunSpec> runs;
  std::filesystem::path out_dir = "out";
  MetricsFormat format = MetricsFormat::Csv;
  bool trace = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Supported sweep variables: rb_per_slice (access RBs = L * v), epsilon
/// (sets epsilon and phi), collision_prob (fixed Pr_s) and none.
void apply_sweep(sim::SimConfig& config, const std::string& variable, double value);

/// Stable 64-bit FNV-1a hash of the resolved config without its seed.
std::string config_hash(const sim::SimConfig& config);

/// Expands a manifest document. Runs are the product scenarios x schemes x
/// sweep values x seeds over the "base" document, followed by any explicit
/// "runs" entries. A document with neither yields no runs.
RunManifest manifest_from_json(const Json& doc);
RunManifest load_manifest(const std::filesystem::path& path);

struct RunSummary {
  std::string scenario;
  std::string scheme;
  std::string sweep_variable;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "error: ..."
  double mean_reward_top = 0.0;  // slice 0, averaged over periods
  double mean_reward_all = 0.0;  // all (period, slice) rows
  double mean_abs_gap_top = 0.0;
  bool conserved = true;
  std::string file;
};

/// Summary of one run's metrics, matching a row of the aggregate table.
RunSummary summarize(const RunSpec& run, const std::vector<sim::MetricsRecord>& metrics);

struct BatchResult {
  int exit_code = 0;  // 0 when every run finished, 3 otherwise
  std::vector<RunSummary> rows;
};

/// Runs every entry (concurrently), writes one metrics file per run under
/// out_dir/runs and out_dir/aggregate.csv once all runs have finished.
BatchResult run_batch(const RunManifest& manifest);

inline constexpr std::string_view kAggregateHeader =
    "scenario,scheme,sweep_variable,sweep_value,seed,status,mean_reward_top,mean_reward_all,mean_abs_gap_top,"
    "conserved,file";

}  // namespace m2m::io

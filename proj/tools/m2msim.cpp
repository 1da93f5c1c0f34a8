#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "m2m/batch.hpp"
#include "m2m/config.hpp"
#include "m2m/errors.hpp"
#include "m2m/metrics.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded simulator for POMDP-based M2M random access in a sliced cell."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string trace_path;
  std::string format = "csv";
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run one configuration and write its metrics");
  run->add_option("--config", config_path, "Configuration JSON")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the configured seed");
  run->add_option("--out", out_path, "Metrics file (stdout when omitted)");
  run->add_option("--trace", trace_path, "Per-slot JSONL trace file");
  run->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* sweep = app.add_subcommand("sweep", "Run every entry of a manifest");
  sweep->add_option("--config", config_path, "Manifest JSON")->required();
  auto* sweep_out = sweep->add_option("--out", out_path, "Output directory (overrides the manifest)");
  auto* sweep_trace = sweep->add_flag("--trace", "Write per-slot traces");
  auto* sweep_format =
      sweep->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* validate = app.add_subcommand("validate", "Check a configuration and print it fully resolved");
  validate->add_option("--config", config_path, "Configuration JSON")->required();

  std::string preset;
  auto* presets = app.add_subcommand("presets", "List presets, or dump one");
  presets->add_option("name", preset, "Preset to dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*presets) {
      if (preset.empty()) {
        for (const auto& n : m2m::io::preset_names()) std::cout << n << '\n';
      } else {
        std::cout << m2m::io::preset_json(preset).dump(2) << '\n';
      }
      return kOk;
    }

    if (*validate) {
      const auto cfg = m2m::io::load_config(config_path);
      std::cout << m2m::io::to_json(cfg).dump(2) << '\n';
      return kOk;
    }

    if (*run) {
      auto cfg = m2m::io::load_config(config_path);
      if (*seed_opt) cfg.seed = seed;
      const auto fmt = m2m::io::parse_format(format);
      const auto result = m2m::sim::run_simulation(cfg, !trace_path.empty());
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      if (out_path.empty()) {
        if (fmt == m2m::io::MetricsFormat::Csv) {
          m2m::io::write_metrics_csv(result.metrics, std::cout);
        } else {
          m2m::io::write_metrics_jsonl(result.metrics, std::cout);
        }
      } else {
        m2m::io::write_metrics(result.metrics, out_path, fmt);
      }
      if (!trace_path.empty()) m2m::io::write_trace(result.trace, trace_path);
      return kOk;
    }

    if (*sweep) {
      auto manifest = m2m::io::load_manifest(config_path);
      if (*sweep_out) manifest.out_dir = out_path;
      if (*sweep_trace) manifest.trace = true;
      if (*sweep_format) manifest.format = m2m::io::parse_format(format);
      const auto result = m2m::io::run_batch(manifest);
      std::size_t failed = 0;
      for (const auto& r : result.rows) failed += r.status != "ok";
      std::cerr << result.rows.size() << " runs, " << failed << " failed; aggregate at "
                << (manifest.out_dir / "aggregate.csv").string() << '\n';
      return result.exit_code;
    }
  } catch (const m2m::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const m2m::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

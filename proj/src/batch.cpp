#include "m2m/batch.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <thread>

#include "m2m/errors.hpp"

namespace m2m::io {

namespace {

std::vector<std::string> string_list(const Json& doc, const char* key, std::vector<std::string> fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_array()) throw ValidationError(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw ValidationError(key, "expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::vector<std::uint64_t> seed_list(const Json& doc, std::uint64_t fallback) {
  if (!doc.contains("seeds")) return {fallback};
  const auto& v = doc.at("seeds");
  std::vector<std::uint64_t> out;
  if (v.is_object()) {
    const auto start = v.value("start", std::uint64_t{0});
    const auto count = v.value("count", std::uint64_t{1});
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(start + i);
  } else if (v.is_array()) {
    for (const auto& s : v) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0) throw ValidationError("seeds", "expected non-negative integers");
      out.push_back(s.get<std::uint64_t>());
    }
  } else {
    throw ValidationError("seeds", "expected an array or {\"start\", \"count\"}");
  }
  return out;
}

std::string file_stem(const RunSpec& r) {
  std::string s = r.config.scenario + "__" + std::string(sim::scheme_name(r.config.scheme));
  if (r.sweep_variable != "none") s += "__" + r.sweep_variable + "-" + format_real(r.sweep_value);
  return s + "__seed" + std::to_string(r.config.seed);
}

}  // namespace

void apply_sweep(sim::SimConfig& c, const std::string& variable, double value) {
  if (variable == "none") return;
  if (variable == "rb_per_slice") {
    if (value < 1 || value != std::floor(value)) throw ValidationError("sweep.values", "rb_per_slice must be a positive integer");
    c.cell.access_rbs = static_cast<int>(c.slices.size()) * static_cast<int>(value);
  } else if (variable == "epsilon") {
    c.epsilon = value;
    c.phi = value;
  } else if (variable == "collision_prob") {
    c.collision.mode = sim::CollisionSpec::Mode::Fixed;
    c.collision.value = value;
  } else {
    throw ValidationError("sweep.variable", "unknown sweep variable '" + variable + "'");
  }
  c.validate();
}

std::string config_hash(const sim::SimConfig& config) {
  auto doc = to_json(config);
  doc.erase("seed");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest manifest_from_json(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("manifest", "expected an object");
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> known = {"base",  "scenarios", "schemes", "seeds", "sweep",
                                                "runs",  "out_dir",   "format",  "trace", "threads"};
    if (!known.count(key)) throw ValidationError(key, "unknown key");
  }
  RunManifest m;
  if (doc.contains("out_dir")) m.out_dir = doc.at("out_dir").get<std::string>();
  if (doc.contains("format")) m.format = parse_format(doc.at("format").get<std::string>());
  m.trace = doc.value("trace", false);
  m.threads = doc.value("threads", 0u);

  std::set<std::string> keys;
  auto add = [&](RunSpec r) {
    r.key = config_hash(r.config) + "/" + std::to_string(r.config.seed);
    if (!keys.insert(r.key).second) throw ValidationError("runs", "duplicate (config, seed) pair " + r.key);
    m.runs.push_back(std::move(r));
  };

  if (doc.contains("base") || doc.contains("scenarios")) {
    const Json base = doc.value("base", Json::object());
    if (!base.is_object()) throw ValidationError("base", "expected an object");
    const auto scenarios = string_list(doc, "scenarios", {base.value("scenario", std::string("custom"))});
    const auto schemes = string_list(doc, "schemes", {base.value("scheme", std::string("pomdp_with_loop"))});
    const auto seeds = seed_list(doc, base.value("seed", std::uint64_t{0}));
    std::string variable = "none";
    std::vector<double> values = {0.0};
    if (doc.contains("sweep")) {
      const auto& sw = doc.at("sweep");
      variable = sw.value("variable", std::string("none"));
      if (variable != "none") values = sw.at("values").get<std::vector<double>>();
    }
    for (const auto& scenario : scenarios) {
      for (const auto& scheme : schemes) {
        for (double v : values) {
          for (auto seed : seeds) {
            Json d = base;
            d["scenario"] = scenario;
            d["scheme"] = scheme;
            d["seed"] = seed;
            RunSpec r;
            r.config = config_from_json(d);
            apply_sweep(r.config, variable, v);
            r.sweep_variable = variable;
            r.sweep_value = variable == "none" ? 0.0 : v;
            add(std::move(r));
          }
        }
      }
    }
  }
  if (doc.contains("runs")) {
    for (const auto& d : doc.at("runs")) {
      RunSpec r;
      r.config = config_from_json(d);
      add(std::move(r));
    }
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(parse_json(read_file(path)));
}

RunSummary summarize(const RunSpec& run, const std::vector<sim::MetricsRecord>& metrics) {
  RunSummary s;
  s.scenario = run.config.scenario;
  s.scheme = std::string(sim::scheme_name(run.config.scheme));
  s.sweep_variable = run.sweep_variable;
  s.sweep_value = run.sweep_value;
  s.seed = run.config.seed;
  int top = 0;
  for (const auto& r : metrics) {
    s.mean_reward_all += r.mean_reward;
    if (r.slice_id == 0) {
      s.mean_reward_top += r.mean_reward;
      s.mean_abs_gap_top += std::abs(r.gap);
      ++top;
    }
  }
  if (!metrics.empty()) s.mean_reward_all /= static_cast<double>(metrics.size());
  if (top > 0) {
    s.mean_reward_top /= top;
    s.mean_abs_gap_top /= top;
  }
  return s;
}

BatchResult run_batch(const RunManifest& manifest) {
  BatchResult res;
  res.rows.resize(manifest.runs.size());
  const auto run_dir = manifest.out_dir / "runs";
  std::filesystem::create_directories(run_dir);
  const char* ext = manifest.format == MetricsFormat::Csv ? ".csv" : ".jsonl";

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < manifest.runs.size(); i = next++) {
      const auto& run = manifest.runs[i];
      const auto stem = file_stem(run);
      const auto file = run_dir / (stem + ext);
      try {
        const auto out = sim::run_simulation(run.config, manifest.trace);
        write_metrics(out.metrics, file, manifest.format);
        if (manifest.trace) write_trace(out.trace, run_dir / (stem + ".trace.jsonl"));
        res.rows[i] = summarize(run, out.metrics);
        res.rows[i].conserved = out.conserved;
      } catch (const std::exception& e) {
        res.rows[i] = summarize(run, {});
        res.rows[i].status = std::string("error: ") + e.what();
      }
      res.rows[i].file = std::filesystem::relative(file, manifest.out_dir).generic_string();
    }
  };

  unsigned n = manifest.threads ? manifest.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, manifest.runs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  std::filesystem::create_directories(manifest.out_dir);
  const auto agg_path = manifest.out_dir / "aggregate.csv";
  std::ofstream agg(agg_path, std::ios::binary);
  if (!agg) throw Error("cannot write " + agg_path.string());
  agg << kAggregateHeader << '\n';
  for (const auto& r : res.rows) {
    std::string status = r.status;
    for (auto& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    agg << r.scenario << ',' << r.scheme << ',' << r.sweep_variable << ',' << format_real(r.sweep_value) << ','
        << r.seed << ',' << status << ',' << format_real(r.mean_reward_top) << ','
        << format_real(r.mean_reward_all) << ',' << format_real(r.mean_abs_gap_top) << ','
        << (r.conserved ? 1 : 0) << ',' << r.file << '\n';
    if (r.status != "ok") res.exit_code = 3;
  }
  agg.flush();
  if (!agg) throw Error("write failed for " + agg_path.string());
  return res;
}

}  // namespace m2m::io

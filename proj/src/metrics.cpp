#include "m2m/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "m2m/errors.hpp"

namespace m2m::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

MetricsFormat parse_format(std::string_view name) {
  if (name == "csv") return MetricsFormat::Csv;
  if (name == "jsonl") return MetricsFormat::Jsonl;
  throw ValidationError("format", "expected csv or jsonl");
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_metrics_csv(std::span<const sim::MetricsRecord> records, std::ostream& out) {
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    out << r.period << ',' << r.slice_id << ',' << format_real(r.obtained_rate) << ','
        << format_real(r.filtered_rate) << ',' << format_real(r.obtained_ratio) << ','
        << format_real(r.target_ratio) << ',' << format_real(r.gap) << ',' << r.rbs << ','
        << format_real(r.delta_real) << ',' << r.delta_applied << ',' << format_real(r.mean_reward) << '\n';
  }
}

void write_metrics_jsonl(std::span<const sim::MetricsRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    // Numbers go through format_real so CSV and JSONL carry the same digits.
    out << "{\"period\":" << r.period << ",\"slice_id\":" << r.slice_id << ",\"C_l\":" << format_real(r.obtained_rate)
        << ",\"Q_l\":" << format_real(r.filtered_rate) << ",\"xi_l\":" << format_real(r.obtained_ratio)
        << ",\"xi_target\":" << format_real(r.target_ratio) << ",\"e_l\":" << format_real(r.gap)
        << ",\"R_l\":" << r.rbs << ",\"delta_R_real\":" << format_real(r.delta_real)
        << ",\"delta_R_applied\":" << r.delta_applied << ",\"mean_reward\":" << format_real(r.mean_reward)
        << "}\n";
  }
}

void write_metrics(std::span<const sim::MetricsRecord> records, const std::filesystem::path& path,
                   MetricsFormat format) {
  auto out = open_out(path);
  if (format == MetricsFormat::Csv) {
    write_metrics_csv(records, out);
  } else {
    write_metrics_jsonl(records, out);
  }
  out.flush();
  check_written(out, path);
}

std::vector<sim::MetricsRecord> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw Error("unexpected metrics header");
  std::vector<sim::MetricsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 11) throw Error("expected 11 fields in metrics row");
    sim::MetricsRecord r;
    r.period = std::stoi(f[0]);
    r.slice_id = std::stoi(f[1]);
    r.obtained_rate = std::stod(f[2]);
    r.filtered_rate = std::stod(f[3]);
    r.obtained_ratio = std::stod(f[4]);
    r.target_ratio = std::stod(f[5]);
    r.gap = std::stod(f[6]);
    r.rbs = std::stoi(f[7]);
    r.delta_real = std::stod(f[8]);
    r.delta_applied = std::stoi(f[9]);
    r.mean_reward = std::stod(f[10]);
    out.push_back(r);
  }
  return out;
}

std::vector<sim::MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_metrics_csv(in);
}

void write_trace(std::span<const sim::TraceRecord> trace, std::ostream& out) {
  for (const auto& t : trace) {
    out << "{\"slot\":" << t.slot << ",\"device_id\":" << t.device_id << ",\"action\":" << t.action
        << ",\"observation\":\"" << t.observation << "\",\"reward\":" << format_real(t.reward) << "}\n";
  }
}

void write_trace(std::span<const sim::TraceRecord> trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_trace(trace, out);
  out.flush();
  check_written(out, path);
}

nlohmann::json alphas_to_json(const pomdp::ValueFunctionStage<double>& stage) {
  nlohmann::json alphas = nlohmann::json::array();
  for (const auto& a : stage.alphas) {
    std::vector<double> coeffs(a.coeffs.data(), a.coeffs.data() + a.coeffs.size());
    alphas.push_back({{"action", a.action}, {"coeffs", coeffs}});
  }
  return {{"stage", stage.stage}, {"alphas", alphas}};
}

}  // namespace m2m::io

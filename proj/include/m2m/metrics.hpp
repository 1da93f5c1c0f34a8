#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "m2m/engine.hpp"

namespace m2m::io {

enum class MetricsFormat { Csv, Jsonl };

MetricsFormat parse_format(std::string_view name);

inline constexpr std::string_view kMetricsHeader =
    "period,slice_id,C_l,Q_l,xi_l,xi_target,e_l,R_l,delta_R_real,delta_R_applied,mean_reward";

/// Reals are printed with 12 significant digits.
std::string format_real(double x);

void write_metrics_csv(std::span<const sim::MetricsRecord> records, std::ostream& out);
void write_metrics_jsonl(std::span<const sim::MetricsRecord> records, std::ostream& out);
void write_metrics(std::span<const sim::MetricsRecord> records, const std::filesystem::path& path,
                   MetricsFormat format = MetricsFormat::Csv);

std::vector<sim::MetricsRecord> read_metrics_csv(std::istream& in);
std::vector<sim::MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

/// One JSON object per line: slot, device_id, action, observation, reward.
void write_trace(std::span<const sim::TraceRecord> trace, std::ostream& out);
void write_trace(std::span<const sim::TraceRecord> trace, const std::filesystem::path& path);

/// Alpha set as {"stage": k, "alphas": [{"action": a, "coeffs": [...]}, ...]}.
nlohmann::json alphas_to_json(const pomdp::ValueFunctionStage<double>& stage);

}  // namespace m2m::io

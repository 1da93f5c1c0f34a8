#include "m2m/virtualization.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "m2m/errors.hpp"

namespace m2m {

namespace {

std::vector<int> even_split(int total, int parts) {
  std::vector<int> out(static_cast<std::size_t>(parts), total / parts);
  for (int i = 0; i < total % parts; ++i) ++out[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace

double draw_distance(double radius_m, Rng& rng) {
  return std::max(1.0, radius_m * std::sqrt(unit_uniform(rng)));
}

std::vector<VirtualNetwork> slice_network(const PhysicalCell& cell, std::span<const double> weights,
                                          std::span<const int> device_counts,
                                          std::span<const double> bandwidths, Rng& rng) {
  const auto l = static_cast<int>(weights.size());
  if (l < 1) throw DomainError("at least one slice is required");
  if (device_counts.size() != weights.size() || bandwidths.size() != weights.size())
    throw DomainError("weights, device counts and bandwidths must have equal length");
  if (l > cell.access_rbs) throw DomainError("more slices than access RBs");
  if (cell.data_rbs < 0) throw DomainError("data RB count must be non-negative");
  if (!(cell.cell_radius_m >= 1.0)) throw DomainError("cell radius must be at least 1 m");
  for (int i = 0; i < l; ++i) {
    if (!(weights[i] > 0.0)) throw DomainError("slice weights must be positive");
    if (i > 0 && weights[i] > weights[i - 1]) throw DomainError("slice weights must be nonincreasing");
    if (device_counts[i] < 1) throw DomainError("every slice needs at least one device");
    if (!(bandwidths[i] > 0.0)) throw DomainError("bandwidth must be positive");
  }

  const auto access = even_split(cell.access_rbs, l);
  const auto data = even_split(cell.data_rbs, l);
  std::vector<VirtualNetwork> out(static_cast<std::size_t>(l));
  int next_rb = 0;
  int next_dev = 0;
  for (int i = 0; i < l; ++i) {
    auto& v = out[static_cast<std::size_t>(i)];
    v.slice_id = i;
    v.weight = weights[i];
    v.bandwidth = bandwidths[i];
    v.data_rb_share = data[static_cast<std::size_t>(i)];
    for (int r = 0; r < access[static_cast<std::size_t>(i)]; ++r) v.access_rbs.push_back(next_rb++);
    for (int n = 0; n < device_counts[i]; ++n) {
      radio::MtcDevice d;
      d.id = next_dev++;
      d.slice_id = i;
      d.distance_m = draw_distance(cell.cell_radius_m, rng);
      d.channel_gain = radio::gain_from_path_loss(radio::path_loss_db(d.distance_m));
      v.devices.push_back(d);
    }
  }
  return out;
}

double period_obtained_rate(const Eigen::MatrixXd& device_slot_rates) {
  if (device_slot_rates.size() == 0) throw DomainError("no rate records in the period");
  return device_slot_rates.mean();
}

std::vector<SliceMetrics> compute_ratios(std::span<const double> rates, std::span<const double> weights) {
  if (rates.size() != weights.size() || rates.empty())
    throw DomainError("rates and weights must be non-empty and of equal length");
  double rate_sum = 0.0;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!std::isfinite(rates[i])) throw DomainError("rates must be finite");
    if (!(weights[i] > 0.0)) throw DomainError("weights must be positive");
    rate_sum += rates[i];
    weight_sum += weights[i];
  }
  if (!(rate_sum > 0.0)) throw AllRatesZero("the slice rates do not sum to a positive value");
  std::vector<SliceMetrics> out(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    auto& m = out[i];
    m.obtained_rate = rates[i];
    m.obtained_ratio = rates[i] / rate_sum;
    m.desired_ratio = weights[i] / weight_sum;
    m.gap = m.desired_ratio - m.obtained_ratio;
  }
  return out;
}

RatioBoundReport ratio_bound_check(int total_rbs, int slices, double mean_ratio,
                                   std::span<const double> ratios, const std::string& what) {
  if (slices < 1 || total_rbs <= slices) throw DomainError("need R_total > L >= 1");
  if (!(mean_ratio > 0.0)) throw DomainError("mean ratio must be positive");
  RatioBoundReport rep;
  const double ln_r = std::log(static_cast<double>(total_rbs));
  rep.xi_max = mean_ratio * ln_r / (ln_r - std::log(static_cast<double>(slices)));
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] > rep.xi_max) {
      rep.flagged.push_back(static_cast<int>(i));
      char buf[160];
      std::snprintf(buf, sizeof buf, "slice %zu %s %.6g exceeds the bound %.6g", i, what.c_str(),
                    ratios[i], rep.xi_max);
      rep.warnings.emplace_back(buf);
    }
  }
  return rep;
}

}  // namespace m2m

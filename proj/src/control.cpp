#include "m2m/control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "m2m/errors.hpp"

namespace m2m {

namespace {

void check_gains(double mu, double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw DomainError("omega must lie in (0,1)");
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
}

int round_away(double x) { return static_cast<int>(std::lround(x)); }

}  // namespace

double smooth_rate(double q_prev, double c_now, double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw DomainError("omega must lie in (0,1)");
  return omega * q_prev + (1.0 - omega) * c_now;
}

double rb_correction(double e_now, double e_prev, double sum_q, double mu, double omega) {
  check_gains(mu, omega);
  return sum_q / (mu * (1.0 - omega)) * (e_now - omega * e_prev);
}

ControlUpdate controller_step(ControllerState& state, std::span<const double> rates,
                              std::span<const double> weights) {
  const auto& cfg = state.config;
  check_gains(cfg.mu, cfg.omega);
  const std::size_t l = rates.size();
  ControlUpdate out;
  if (!(std::accumulate(rates.begin(), rates.end(), 0.0) > 0.0)) {
    out.skipped = true;
    out.filtered = state.filtered.empty() ? std::vector<double>(l, 0.0) : state.filtered;
    out.corrections.assign(l, 0.0);
    return out;
  }

  std::vector<double> q(rates.begin(), rates.end());
  if (state.filtered.size() == l)
    for (std::size_t i = 0; i < l; ++i) q[i] = smooth_rate(state.filtered[i], rates[i], cfg.omega);
  if (state.prev_gap.size() != l) state.prev_gap.assign(l, 0.0);

  out.gaps = compute_ratios(q, weights);
  const double sum_q = std::accumulate(q.begin(), q.end(), 0.0);
  out.corrections.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    out.corrections[i] = rb_correction(out.gaps[i].gap, state.prev_gap[i], sum_q, cfg.mu, cfg.omega);
    state.prev_gap[i] = out.gaps[i].gap;
  }
  state.filtered = q;
  out.filtered = std::move(q);
  return out;
}

AllocationDelta reallocate(std::vector<int>& slice_rbs, int& data_rbs, std::span<const double> corrections,
                           const ControllerConfig& config) {
  const std::size_t l = slice_rbs.size();
  if (corrections.size() != l) throw DomainError("one correction per slice is required");
  AllocationDelta d;
  d.real.assign(corrections.begin(), corrections.end());
  d.requested.resize(l);
  d.applied.assign(l, 0);

  int released = 0;
  int demand = 0;
  for (std::size_t i = 0; i < l; ++i) {
    d.requested[i] = round_away(corrections[i]);
    if (d.requested[i] < 0) {
      const int can = std::max(0, slice_rbs[i] - config.min_rb_per_slice);
      const int give = std::min(-d.requested[i], can);
      if (give < -d.requested[i]) d.clamped = true;
      d.applied[i] = -give;
      released += give;
    } else {
      demand += d.requested[i];
    }
  }

  const int pool_supply = std::max(0, data_rbs - config.data_rb_floor);
  const int supply = pool_supply + released;
  if (demand <= supply) {
    for (std::size_t i = 0; i < l; ++i)
      if (d.requested[i] > 0) d.applied[i] = d.requested[i];
  } else {
    // Largest remainder; equal remainders favour the lower slice index.
    std::vector<std::pair<double, std::size_t>> rem;
    int given = 0;
    for (std::size_t i = 0; i < l; ++i) {
      if (d.requested[i] <= 0) continue;
      const double share = static_cast<double>(supply) * d.requested[i] / demand;
      d.applied[i] = static_cast<int>(std::floor(share));
      given += d.applied[i];
      rem.emplace_back(share - d.applied[i], i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; given < supply; ++j, ++given) ++d.applied[rem[j].second];
    d.shortfall = demand - supply;
  }

  int served = 0;
  for (std::size_t i = 0; i < l; ++i) {
    if (d.applied[i] > 0) served += d.applied[i];
    slice_rbs[i] += d.applied[i];
  }
  d.from_data_pool = std::min(served, pool_supply);
  d.from_slices = served - d.from_data_pool;
  d.returned_to_pool = released - d.from_slices;
  data_rbs += d.data_pool_change();
  return d;
}

void move_rb_ids(std::vector<std::vector<int>>& slice_rbs, std::vector<int>& pool,
                 const AllocationDelta& delta) {
  std::vector<int> released;
  for (std::size_t i = 0; i < slice_rbs.size(); ++i) {
    for (int k = 0; k < -delta.applied[i]; ++k) {
      released.push_back(slice_rbs[i].back());
      slice_rbs[i].pop_back();
    }
  }
  std::sort(released.begin(), released.end());
  int from_pool = delta.from_data_pool;
  std::size_t next_released = 0;
  for (std::size_t i = 0; i < slice_rbs.size(); ++i) {
    for (int k = 0; k < delta.applied[i]; ++k) {
      if (from_pool > 0) {
        slice_rbs[i].push_back(pool.back());
        pool.pop_back();
        --from_pool;
      } else {
        slice_rbs[i].push_back(released.at(next_released++));
      }
    }
    std::sort(slice_rbs[i].begin(), slice_rbs[i].end());
  }
  pool.insert(pool.end(), released.begin() + static_cast<std::ptrdiff_t>(next_released), released.end());
  std::sort(pool.begin(), pool.end());
}

}  // namespace m2m

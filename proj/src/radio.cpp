#include "m2m/radio.hpp"

#include <cmath>
#include <numeric>

#include "m2m/errors.hpp"

namespace m2m::radio {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double preamble_collision_prob(int total_devices, int same_choice, int preambles) {
  if (preambles < 1) throw DomainError("preamble count must be at least 1");
  if (total_devices < 0 || same_choice < 0 || same_choice > total_devices)
    throw DomainError("need 0 <= same_choice <= total_devices");
  const double p = 1.0 / preambles;
  const int n = total_devices;
  const int k = same_choice;
  if (p == 1.0) return k == n ? 1.0 : 0.0;
  const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_binom + k * std::log(p) + (n - k) * std::log1p(-p));
}

double collision_prob(const PreambleConfig& cfg, int total_devices, int same_choice) {
  if (cfg.collision_prob_override) {
    const double v = *cfg.collision_prob_override;
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("collision probability must lie in [0,1]");
    return v;
  }
  return preamble_collision_prob(total_devices, same_choice, cfg.preamble_count);
}

double path_loss_db(double distance_m) {
  if (!(distance_m > 0.0)) throw DomainError("distance must be positive");
  return 8.0 + 37.6 * std::log10(distance_m);
}

double gain_from_path_loss(double path_loss_db) { return std::pow(10.0, -path_loss_db / 10.0); }

double received_power_mw(double tx_power_dbm, double gain) { return dbm_to_mw(tx_power_dbm) * gain; }

double instantaneous_rate(const ResourceBlockParams& rb, RbState state, double collision_prob,
                          std::span<const double> interferer_powers_mw) {
  const double signal = received_power_mw(rb.tx_power_dbm, rb.channel_gain);
  double denom = dbm_to_mw(rb.noise_power_dbm);
  if (state == RbState::Busy)
    denom = std::accumulate(interferer_powers_mw.begin(), interferer_powers_mw.end(), denom);
  return (1.0 - collision_prob) * rb.bandwidth * std::log2(1.0 + signal / denom);
}

double slot_reward(int action, std::span<const double> rates_per_rb) {
  if (action == 0) return 0.0;
  if (action < 0 || static_cast<std::size_t>(action) > rates_per_rb.size())
    throw DomainError("unknown action");
  return rates_per_rb[static_cast<std::size_t>(action - 1)];
}

double discounted_total_reward(std::span<const double> rewards, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0,1]");
  const auto k = static_cast<double>(rewards.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i)
    total += std::pow(beta, k - static_cast<double>(i) - 1.0) * rewards[i];
  return total;
}

}  // namespace m2m::radio

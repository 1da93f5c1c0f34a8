#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace m2m::radio {

enum class RbState : std::uint8_t { Idle = 0, Busy = 1 };

struct ResourceBlockParams {
  double bandwidth = 1.0;       // Hz; 1.0 gives rates in bit/s/Hz
  double tx_power_dbm = 20.0;
  double noise_power_dbm = -104.0;
  double channel_gain = 1.0;    // linear, from path loss
};

struct PreambleConfig {
  int preamble_count = 64;
  std::optional<double> collision_prob_override;
};

/// A machine-type device. Distance is measured to the eNodeB.
struct MtcDevice {
  int id = 0;
  int slice_id = 0;
  double distance_m = 1.0;
  double channel_gain = 1.0;
};

double dbm_to_mw(double dbm);

/// Binomial probability that exactly `same_choice` of `total_devices` devices
/// pick a given preamble out of `preambles`.
double preamble_collision_prob(int total_devices, int same_choice, int preambles);

/// The override when present, otherwise the binomial value.
double collision_prob(const PreambleConfig& cfg, int total_devices, int same_choice);

/// Outdoor M2M path loss in dB: 8 + 37.6 log10(d).
double path_loss_db(double distance_m);

/// Linear gain 10^(-PL/10).
double gain_from_path_loss(double path_loss_db);

/// Received power in mW for a transmitter at `tx_power_dbm` through `gain`.
double received_power_mw(double tx_power_dbm, double gain);

/// Shannon rate on one RB, scaled by (1 - Pr_s). A busy RB adds the listed
/// interferer powers (mW) to the noise floor.
double instantaneous_rate(const ResourceBlockParams& rb, RbState state, double collision_prob,
                          std::span<const double> interferer_powers_mw = {});

/// Reward of one slot: 0 for no access (action 0), else the rate of RB
/// action-1 evaluated under its true state.
double slot_reward(int action, std::span<const double> rates_per_rb);

/// sum_k beta^(K-k-1) reward[k]
double discounted_total_reward(std::span<const double> rewards, double beta);

}  // namespace m2m::radio

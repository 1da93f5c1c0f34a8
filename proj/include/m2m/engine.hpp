#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "m2m/control.hpp"
#include "m2m/pomdp.hpp"
#include "m2m/radio.hpp"
#include "m2m/random.hpp"
#include "m2m/virtualization.hpp"

namespace m2m::sim {

enum class Scheme { PomdpWithLoop, PomdpNoLoop, NoObservationNoLoop, PerfectKnowledge };

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);
bool uses_control_loop(Scheme s);

struct SliceSpec {
  double weight = 1.0;
  int devices = 1;
  double bandwidth = 1.0;
};

struct CollisionSpec {
  enum class Mode { Fixed, Binomial };
  Mode mode = Mode::Fixed;
  double value = 0.0;   // used when fixed
  int same_choice = 1;  // used when binomial
};

struct SimConfig {
  std::string scenario = "custom";
  Scheme scheme = Scheme::PomdpWithLoop;
  std::uint64_t seed = 0;
  int slots_per_period = 100;
  int periods = 10;
  int dp_horizon = 1;
  double beta = 0.8;
  double epsilon = 0.1;
  double phi = 0.1;
  CollisionSpec collision;
  Eigen::Matrix2d rb_transition{{0.9, 0.1}, {0.95, 0.05}};
  double attempt_prob = 1.0;
  int sensing_window = 5;
  int max_joint_rbs = 12;
  int state_cap = 4096;
  PhysicalCell cell;
  double tx_power_dbm = 20.0;
  double noise_power_dbm = -104.0;
  std::vector<SliceSpec> slices;
  ControllerConfig controller;
  std::optional<double> mean_ratio;  // defaults to 1/L

  int device_count() const;
  /// Throws ValidationError naming the first offending field.
  void validate() const;
};

struct MetricsRecord {
  int period = 0;
  int slice_id = 0;
  double obtained_rate = 0.0;   // C_l
  double filtered_rate = 0.0;   // Q_l
  double obtained_ratio = 0.0;  // xi_l
  double target_ratio = 0.0;    // xi'_l
  double gap = 0.0;             // e_l
  int rbs = 0;                  // R_l during the period
  double delta_real = 0.0;
  int delta_applied = 0;
  double mean_reward = 0.0;
};

struct TraceRecord {
  long slot = 0;
  int device_id = 0;
  int action = 0;  // 0 = no access, else physical RB id + 1
  std::string observation;
  double reward = 0.0;
};

struct SimResult {
  std::vector<MetricsRecord> metrics;
  std::vector<TraceRecord> trace;
  std::vector<std::string> warnings;
  bool conserved = true;  // sum R_l + R' == R_total after every period
};

/// One Markov step of every RB, drawing in ascending RB order.
void evolve_states(std::vector<radio::RbState>& states, const Eigen::Matrix2d& transition, Rng& rng);

/// Noisy reading of `states`: entry i flips with probability epsilon when
/// action == i + 1 and with probability phi otherwise.
std::vector<std::uint8_t> gen_observation(std::span<const radio::RbState> states, int action, double epsilon,
                                          double phi, Rng& rng);

/// Runtime view of a device.
struct DeviceRuntime {
  radio::MtcDevice device;
  int index_in_slice = 0;
  std::vector<int> window;                 // physical RB ids it models
  std::vector<Eigen::Vector2d> belief;     // one factor per window RB
  std::vector<pomdp::ValueFunctionStage<double>> policy;
  Rng obs_rng;
};

struct CellState {
  std::vector<radio::RbState> states;     // per physical RB
  std::vector<double> occupant_power_mw;  // exogenous user on a busy RB
  Eigen::Matrix2d transition;
};

struct SlotContext {
  Scheme scheme = Scheme::PomdpNoLoop;
  double epsilon = 0.1;
  double phi = 0.1;
  double collision_prob = 0.0;
  double attempt_prob = 1.0;
  double tx_power_dbm = 20.0;
  double noise_power_dbm = -104.0;
  std::vector<double> slice_bandwidth;
  pomdp::Index stage = 0;
  const pomdp::PomdpModel<double>* factor_model = nullptr;  // per-RB model used for belief updates
};

struct DeviceOutcome {
  int device_id = 0;
  int action = 0;  // index into the device's action set
  int rb = -1;     // physical RB, -1 for no access
  double reward = 0.0;
  std::vector<std::uint8_t> observation;
};

/// One slot for every device of the cell, in ascending id order. A device
/// that takes an RB marks it busy for later devices in the same slot. After
/// all decisions the RB chains step once and each device updates its beliefs
/// from a private reading of the new states.
std::vector<DeviceOutcome> run_slot(std::vector<DeviceRuntime>& devices, CellState& cell, const SlotContext& ctx,
                                    Rng& chain_rng, Rng& attempt_rng);

/// Physical RBs a device models: at most `width` of its slice's RBs, starting
/// at an offset that spreads devices over the slice.
std::vector<int> sensing_window(std::span<const int> slice_rbs, int index_in_slice, int width);

SimResult run_simulation(const SimConfig& config, bool with_trace = false);

}  // namespace m2m::sim

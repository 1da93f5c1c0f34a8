#pragma once

#include <span>
#include <vector>

#include "m2m/virtualization.hpp"

namespace m2m {

struct ControllerConfig {
  double omega = 0.8;  // smoothing factor, 0 < omega < 1
  double mu = 2.0;     // rate gained per extra RB
  int min_rb_per_slice = 1;
  int data_rb_floor = 0;
};

struct ControllerState {
  ControllerConfig config;
  std::vector<double> filtered;  // Q_l
  std::vector<double> prev_gap;  // e_l of the previous period, on Q
};

/// omega * q_prev + (1 - omega) * c_now
double smooth_rate(double q_prev, double c_now, double omega);

/// Dead-beat correction sum_q / (mu (1 - omega)) * (e_now - omega e_prev).
double rb_correction(double e_now, double e_prev, double sum_q, double mu, double omega);

struct ControlUpdate {
  bool skipped = false;              // rates summed to zero; state untouched
  std::vector<double> filtered;      // Q_l after this period
  std::vector<SliceMetrics> gaps;    // ratios computed on Q_l
  std::vector<double> corrections;   // real-valued delta R_l
};

/// One period of the control law: smooth the obtained rates (the filter starts
/// at the first period's rates), compare the smoothed ratios with the targets
/// and compute the per-slice RB corrections.
ControlUpdate controller_step(ControllerState& state, std::span<const double> rates,
                              std::span<const double> weights);

struct AllocationDelta {
  std::vector<double> real;
  std::vector<int> requested;  // real corrections rounded half away from zero
  std::vector<int> applied;
  int from_data_pool = 0;      // RBs taken out of the data pool
  int from_slices = 0;         // RBs handed from releasing slices to others
  int returned_to_pool = 0;    // released RBs nobody needed
  int shortfall = 0;           // positive demand left unserved
  bool clamped = false;        // some release was limited by the per-slice floor

  int data_pool_change() const { return returned_to_pool - from_data_pool; }
};

/// Applies integer corrections to the per-slice access RB counts and the data
/// pool. Negative corrections release RBs down to the slice floor; positive
/// ones are served from the data pool above its floor first, then from
/// released RBs. Short supply is shared by largest remainder.
AllocationDelta reallocate(std::vector<int>& slice_rbs, int& data_rbs, std::span<const double> corrections,
                           const ControllerConfig& config);

/// Moves physical RB ids to match `delta`. Lists are kept sorted.
void move_rb_ids(std::vector<std::vector<int>>& slice_rbs, std::vector<int>& pool,
                 const AllocationDelta& delta);

}  // namespace m2m

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "m2m/radio.hpp"
#include "m2m/random.hpp"

namespace m2m {

struct PhysicalCell {
  int access_rbs = 25;
  int data_rbs = 0;
  double cell_radius_m = 1000.0;
  radio::PreambleConfig preambles;

  int total_rbs() const { return access_rbs + data_rbs; }
};

/// One slice: its devices and the physical RBs it currently owns.
struct VirtualNetwork {
  int slice_id = 0;
  double weight = 1.0;
  double bandwidth = 1.0;
  std::vector<radio::MtcDevice> devices;
  std::vector<int> access_rbs;  // physical RB ids, access phase
  int data_rb_share = 0;        // informational share of the data pool
};

struct SliceMetrics {
  double obtained_rate = 0.0;   // C_l
  double obtained_ratio = 0.0;  // xi_l
  double desired_ratio = 0.0;   // xi'_l
  double gap = 0.0;             // e_l = xi'_l - xi_l
};

struct RatioBoundReport {
  double xi_max = 0.0;
  std::vector<int> flagged;  // indices whose ratio exceeds xi_max
  std::vector<std::string> warnings;
};

/// Area-uniform distance in [1, radius] from the eNodeB.
double draw_distance(double radius_m, Rng& rng);

/// Splits the cell into slices. Access RBs 0..R-1 are divided contiguously
/// and as evenly as possible, with the remainder going to the lowest slices;
/// the data pool is shared the same way. Devices get consecutive ids in slice
/// order and random positions.
std::vector<VirtualNetwork> slice_network(const PhysicalCell& cell, std::span<const double> weights,
                                          std::span<const int> device_counts,
                                          std::span<const double> bandwidths, Rng& rng);

/// Mean per-device, per-slot rate of a slice: rows are devices, columns slots.
double period_obtained_rate(const Eigen::MatrixXd& device_slot_rates);

/// Obtained ratios C_l / sum C, desired ratios x_l / sum x and their gaps.
std::vector<SliceMetrics> compute_ratios(std::span<const double> rates, std::span<const double> weights);

/// Upper bound on any slice ratio, mean_ratio * ln R / (ln R - ln L), and the
/// entries of `ratios` that exceed it. Violations are advisory only.
RatioBoundReport ratio_bound_check(int total_rbs, int slices, double mean_ratio,
                                   std::span<const double> ratios, const std::string& what = "ratio");

}  // namespace m2m

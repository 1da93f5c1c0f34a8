#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "m2m/pomdp/model.hpp"
#include "m2m/radio.hpp"

namespace m2m {

/// Expected rates of one RB for a given device, by true RB state.
struct RbLink {
  double idle_rate = 0.0;
  double busy_rate = 0.0;
};

struct AccessModelSpec {
  Eigen::Matrix2d rb_transition;  // per-RB chain, row = current state (0 idle, 1 busy)
  double epsilon = 0.1;           // flip probability on the sensed RB
  double phi = 0.1;               // flip probability on every other RB
  double beta = 0.8;
  int max_rbs = 12;
};

RbLink rb_link(const radio::ResourceBlockParams& rb, double occupant_power_mw, double collision_prob);

/// Joint sensing/access POMDP over `rbs.size()` independent RBs.
///
/// State s packs one bit per RB with RB 0 as the most significant bit (1 =
/// busy); observations share that layout. Action 0 is no access, action r+1
/// accesses and senses RB r. Throws StateSpaceTooLarge beyond `max_rbs`.
pomdp::PomdpModel<double> build_pomdp(std::span<const RbLink> rbs, const AccessModelSpec& spec);

/// Two-state model of a single RB. Action 0 observes it through the phi
/// channel, action 1 through the epsilon channel. Rewards are zero.
pomdp::PomdpModel<double> build_rb_factor(const AccessModelSpec& spec);

/// Flip observation kernel [[1-p, p], [p, 1-p]].
Eigen::Matrix2d flip_kernel(double p);

/// Kronecker product of per-RB beliefs in the joint state order.
Eigen::VectorXd joint_belief(std::span<const Eigen::Vector2d> factors);

pomdp::Index joint_state_index(std::span<const radio::RbState> states);

}  // namespace m2m

#include "m2m/access_model.hpp"

#include <string>

#include "m2m/errors.hpp"

namespace m2m {

using pomdp::Index;

namespace {

int bit(Index s, int rb, int width) { return static_cast<int>((s >> (width - 1 - rb)) & 1); }

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must lie in [0,1]");
}

}  // namespace

RbLink rb_link(const radio::ResourceBlockParams& rb, double occupant_power_mw, double collision_prob) {
  const double interferer[] = {occupant_power_mw};
  return {radio::instantaneous_rate(rb, radio::RbState::Idle, collision_prob),
          radio::instantaneous_rate(rb, radio::RbState::Busy, collision_prob, interferer)};
}

Eigen::Matrix2d flip_kernel(double p) {
  check_prob(p, "flip probability");
  Eigen::Matrix2d k;
  k << 1.0 - p, p, p, 1.0 - p;
  return k;
}

pomdp::PomdpModel<double> build_pomdp(std::span<const RbLink> rbs, const AccessModelSpec& spec) {
  const int w = static_cast<int>(rbs.size());
  if (w < 1) throw DomainError("access model needs at least one RB");
  if (w > spec.max_rbs)
    throw StateSpaceTooLarge(std::to_string(w) + " RBs exceed the joint model cap of " +
                             std::to_string(spec.max_rbs));
  check_prob(spec.epsilon, "epsilon");
  check_prob(spec.phi, "phi");
  const Index n = Index{1} << w;
  const auto& p = spec.rb_transition;

  Eigen::MatrixXd trans(n, n);
  for (Index s = 0; s < n; ++s) {
    for (Index t = 0; t < n; ++t) {
      double v = 1.0;
      for (int r = 0; r < w; ++r) v *= p(bit(s, r, w), bit(t, r, w));
      trans(s, t) = v;
    }
  }

  std::vector<Eigen::MatrixXd> obs;
  obs.reserve(static_cast<std::size_t>(w) + 1);
  for (int a = 0; a <= w; ++a) {
    Eigen::MatrixXd o(n, n);
    for (Index s = 0; s < n; ++s) {
      for (Index z = 0; z < n; ++z) {
        double v = 1.0;
        for (int r = 0; r < w; ++r) {
          const double flip = a == r + 1 ? spec.epsilon : spec.phi;
          v *= bit(s, r, w) == bit(z, r, w) ? 1.0 - flip : flip;
        }
        o(s, z) = v;
      }
    }
    obs.push_back(std::move(o));
  }

  Eigen::MatrixXd reward = Eigen::MatrixXd::Zero(n, w + 1);
  for (Index s = 0; s < n; ++s)
    for (int r = 0; r < w; ++r)
      reward(s, r + 1) = bit(s, r, w) ? rbs[r].busy_rate : rbs[r].idle_rate;

  return {std::move(trans), std::move(obs), std::move(reward), spec.beta};
}

pomdp::PomdpModel<double> build_rb_factor(const AccessModelSpec& spec) {
  return {spec.rb_transition,
          {flip_kernel(spec.phi), flip_kernel(spec.epsilon)},
          Eigen::MatrixXd::Zero(2, 2),
          spec.beta};
}

Eigen::VectorXd joint_belief(std::span<const Eigen::Vector2d> factors) {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(1);
  for (const auto& f : factors) {
    Eigen::VectorXd next(out.size() * 2);
    for (Index i = 0; i < out.size(); ++i) next.segment<2>(2 * i) = out[i] * f;
    out = std::move(next);
  }
  return out;
}

Index joint_state_index(std::span<const radio::RbState> states) {
  Index s = 0;
  for (auto st : states) s = (s << 1) | static_cast<Index>(st);
  return s;
}

}  // namespace m2m

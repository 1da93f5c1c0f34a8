#pragma once

#include <cstdint>
#include <vector>

#include "m2m/pomdp/model.hpp"
#include "m2m/pomdp/solver.hpp"

namespace m2m::pomdp {

inline constexpr double kBruteForceBudget = 1e7;

namespace detail {

// Expected weighted reward collected from stage k onward by the best
// continuation, given the unnormalized state distribution `mass`. Every
// (action, observation) history is expanded; nothing is pruned or shared.
template <typename Scalar>
Scalar expand_histories(const PomdpModel<Scalar>& model, Index horizon, Index k,
                        const Vector<Scalar>& mass) {
  if (k == horizon) return Scalar(0);
  const Scalar weight = stage_weight(model.discount(), horizon, k);
  const Vector<Scalar> next_mass = model.transition().transpose() * mass;
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (Index a = 0; a < model.action_count(); ++a) {
    Scalar total = Scalar(0);
    for (Index s = 0; s < model.state_count(); ++s) total += mass[s] * model.reward()(s, a);
    total *= weight;
    for (Index o = 0; o < model.observation_count(); ++o) {
      const Vector<Scalar> branch = next_mass.cwiseProduct(model.observation(a).col(o));
      if (branch.sum() > Scalar(0)) total += expand_histories(model, horizon, k + 1, branch);
    }
    best = std::max(best, total);
  }
  return best;
}

// Value of one fixed policy tree. `tree` holds one action per node in
// breadth-first order; node i's child for observation o is i*|O| + o + 1.
template <typename Scalar>
Scalar tree_value(const PomdpModel<Scalar>& model, Index horizon, const std::vector<Index>& tree,
                  std::size_t node, Index k, const Vector<Scalar>& mass) {
  if (k == horizon) return Scalar(0);
  const Index a = tree[node];
  Scalar total = stage_weight(model.discount(), horizon, k) * mass.dot(model.reward().col(a));
  const Vector<Scalar> next_mass = model.transition().transpose() * mass;
  const auto n_obs = static_cast<std::size_t>(model.observation_count());
  for (Index o = 0; o < model.observation_count(); ++o) {
    const Vector<Scalar> branch = next_mass.cwiseProduct(model.observation(a).col(o));
    total += tree_value(model, horizon, tree, node * n_obs + static_cast<std::size_t>(o) + 1, k + 1,
                        branch);
  }
  return total;
}

}  // namespace detail

/// Optimal expected weighted total reward over `horizon` slots from `belief`,
/// by exhaustive expansion of every action/observation history.
///
/// Optimal policy trees pick each observation branch's subtree independently,
/// so the maximum over all depth-K trees equals this history expansion.
/// Refuses work beyond 1e7 expanded history nodes.
template <typename Scalar>
Scalar brute_force_value(const PomdpModel<Scalar>& model, Index horizon,
                         const BeliefVector<Scalar>& belief) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  const double fan = static_cast<double>(model.action_count() * model.observation_count());
  double nodes = 0.0;
  double level = 1.0;
  for (Index k = 0; k < horizon; ++k) {
    level *= fan;
    nodes += level;
  }
  if (nodes > kBruteForceBudget) throw TooLarge("history expansion exceeds 1e7 nodes");
  return detail::expand_histories(model, horizon, 0, belief.probs());
}

/// Literal policy-tree enumeration: scores every depth-K tree and returns the
/// best. Only usable on tiny models (guard: 1e7 trees).
template <typename Scalar>
Scalar enumerate_policy_trees(const PomdpModel<Scalar>& model, Index horizon,
                              const BeliefVector<Scalar>& belief) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  const auto n_obs = static_cast<double>(model.observation_count());
  double node_count = 0.0;
  double level = 1.0;
  for (Index k = 0; k < horizon; ++k) {
    node_count += level;
    level *= n_obs;
  }
  const double trees = std::pow(static_cast<double>(model.action_count()), node_count);
  if (trees > kBruteForceBudget) throw TooLarge("policy-tree count exceeds 1e7");

  std::vector<Index> tree(static_cast<std::size_t>(node_count), 0);
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  while (true) {
    best = std::max(best, detail::tree_value(model, horizon, tree, 0, 0, belief.probs()));
    std::size_t i = 0;
    while (i < tree.size() && ++tree[i] == model.action_count()) tree[i++] = 0;
    if (i == tree.size()) break;
  }
  return best;
}

}  // namespace m2m::pomdp

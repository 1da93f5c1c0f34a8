#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "m2m/pomdp/belief.hpp"
#include "m2m/pomdp/model.hpp"
#include "m2m/pomdp/prune.hpp"

namespace m2m::pomdp {

struct SolveOptions {
  double prune_tol = kPruneTol;
  Index state_cap = 4096;
};

/// Weight of the reward earned in slot k of a K-slot period: beta^(K-k-1).
/// Later slots weigh more; with beta = 0 only the final slot counts.
template <typename Scalar>
Scalar stage_weight(Scalar beta, Index horizon, Index stage) {
  return std::pow(beta, static_cast<Scalar>(horizon - stage - 1));
}

/// Zero value function past the last slot.
template <typename Scalar>
ValueFunctionStage<Scalar> terminal_stage(const PomdpModel<Scalar>& model, Index horizon) {
  return {horizon, {AlphaVector<Scalar>{Vector<Scalar>::Zero(model.state_count()), kNoAccess}}};
}

namespace detail {

// Every pairwise sum of one vector from `x` and one from `y`.
template <typename Scalar>
std::vector<AlphaVector<Scalar>> cross_sum(const std::vector<AlphaVector<Scalar>>& x,
                                           const std::vector<AlphaVector<Scalar>>& y) {
  std::vector<AlphaVector<Scalar>> out;
  out.reserve(x.size() * y.size());
  for (const auto& a : x)
    for (const auto& b : y) out.push_back({a.coeffs + b.coeffs, a.action});
  return out;
}

}  // namespace detail

/// Exact dynamic-programming backup J_{k+1} -> J_k by incremental pruning.
///
/// For each action the observation projections of the next-stage alphas are
/// cross-summed one observation at a time, pruning after every step; the
/// weighted immediate reward is added at the end and the union over actions is
/// pruned once more.
template <typename Scalar>
ValueFunctionStage<Scalar> backup(const ValueFunctionStage<Scalar>& next,
                                  const PomdpModel<Scalar>& model, Index horizon,
                                  const SolveOptions& opts = {}) {
  if (next.alphas.empty()) throw DomainError("backup needs a non-empty next stage");
  const Index stage = next.stage - 1;
  if (stage < 0 || stage >= horizon) throw DomainError("stage index outside the horizon");
  const Scalar tol = static_cast<Scalar>(opts.prune_tol);
  const Scalar weight = stage_weight(model.discount(), horizon, stage);
  const auto& trans = model.transition();

  std::vector<AlphaVector<Scalar>> all;
  for (Index a = 0; a < model.action_count(); ++a) {
    const auto& obs = model.observation(a);
    std::vector<AlphaVector<Scalar>> acc;
    for (Index o = 0; o < model.observation_count(); ++o) {
      std::vector<AlphaVector<Scalar>> proj;
      proj.reserve(next.alphas.size());
      for (const auto& alpha : next.alphas)
        proj.push_back({trans * obs.col(o).cwiseProduct(alpha.coeffs), a});
      proj = prune(std::move(proj), tol);
      acc = acc.empty() ? std::move(proj) : prune(detail::cross_sum(acc, proj), tol);
    }
    const Vector<Scalar> immediate = weight * model.reward().col(a);
    for (auto& v : acc) {
      v.coeffs += immediate;
      v.action = a;
      all.push_back(std::move(v));
    }
  }
  return {stage, prune(std::move(all), tol)};
}

/// Optimal value functions for every slot 0..K-1 of a K-slot horizon;
/// `result[k]` is stage k.
template <typename Scalar>
std::vector<ValueFunctionStage<Scalar>> solve(const PomdpModel<Scalar>& model, Index horizon,
                                              const SolveOptions& opts = {}) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  if (model.state_count() > opts.state_cap)
    throw StateSpaceTooLarge("state count " + std::to_string(model.state_count()) +
                             " exceeds the cap of " + std::to_string(opts.state_cap));
  std::vector<ValueFunctionStage<Scalar>> stages(static_cast<std::size_t>(horizon));
  ValueFunctionStage<Scalar> next = terminal_stage(model, horizon);
  for (Index k = horizon - 1; k >= 0; --k) {
    next = backup(next, model, horizon, opts);
    stages[static_cast<std::size_t>(k)] = next;
  }
  return stages;
}

template <typename Scalar>
struct Decision {
  Index action;
  Scalar value;
};

/// Action certified by the best alpha vector at `belief`. Values equal to
/// within rounding (1e-12 relative) count as ties and go to the lower action.
template <typename Scalar>
Decision<Scalar> best_action(const ValueFunctionStage<Scalar>& stage,
                             const BeliefVector<Scalar>& belief) {
  if (stage.alphas.empty()) throw DomainError("empty value function stage");
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (const auto& a : stage.alphas) best = std::max(best, a.dot(belief));
  const Scalar slack = Scalar(1e-12) * std::max(Scalar(1), std::abs(best));
  Index action = -1;
  for (const auto& a : stage.alphas) {
    if (a.dot(belief) >= best - slack && (action < 0 || a.action < action)) action = a.action;
  }
  return {action, best};
}

}  // namespace m2m::pomdp

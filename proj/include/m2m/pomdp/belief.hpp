#pragma once

#include "m2m/pomdp/model.hpp"

namespace m2m::pomdp {

/// Predicted distribution over next states before any observation.
template <typename Scalar>
Vector<Scalar> predict(const BeliefVector<Scalar>& belief, const PomdpModel<Scalar>& model) {
  return model.transition().transpose() * belief.probs();
}

/// Bayes posterior after taking `action` and seeing `observation`.
///
/// Throws ZeroLikelihood when the observation is impossible under the prior;
/// the caller picks the fallback.
template <typename Scalar>
BeliefVector<Scalar> belief_update(const BeliefVector<Scalar>& belief, Index action,
                                   Index observation, const PomdpModel<Scalar>& model) {
  if (belief.size() != model.state_count())
    throw DomainError("belief size does not match the model state count");
  if (action < 0 || action >= model.action_count()) throw DomainError("unknown action");
  if (observation < 0 || observation >= model.observation_count())
    throw DomainError("unknown observation");

  Vector<Scalar> post =
      predict(belief, model).cwiseProduct(model.observation(action).col(observation));
  const Scalar norm = post.sum();
  if (!(norm > Scalar(0))) throw ZeroLikelihood("observation has zero likelihood under the prior");
  post /= norm;
  return BeliefVector<Scalar>(std::move(post));
}

}  // namespace m2m::pomdp

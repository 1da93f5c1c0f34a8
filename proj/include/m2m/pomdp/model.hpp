#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "m2m/errors.hpp"

namespace m2m::pomdp {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// Action 0 is always "no access"; action r + 1 selects resource block r.
inline constexpr Index kNoAccess = 0;

// Tolerance used when checking that probability rows are normalized.
inline constexpr double kStochasticTol = 1e-12;

/// Probability distribution over hidden states.
template <typename Scalar>
class BeliefVector {
 public:
  BeliefVector() = default;

  explicit BeliefVector(Vector<Scalar> probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0) throw DomainError("belief must be non-empty");
    for (Index i = 0; i < probs_.size(); ++i) {
      if (!(probs_[i] >= Scalar(0) && probs_[i] <= Scalar(1)))
        throw DomainError("belief entries must lie in [0,1]");
    }
    if (std::abs(static_cast<double>(probs_.sum()) - 1.0) > kStochasticTol)
      throw DomainError("belief must sum to 1");
  }

  static BeliefVector uniform(Index n) {
    return BeliefVector(Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n)));
  }

  static BeliefVector corner(Index n, Index s) {
    Vector<Scalar> p = Vector<Scalar>::Zero(n);
    p[s] = Scalar(1);
    return BeliefVector(std::move(p));
  }

  const Vector<Scalar>& probs() const noexcept { return probs_; }
  Index size() const noexcept { return probs_.size(); }
  Scalar operator[](Index i) const { return probs_[i]; }

 private:
  Vector<Scalar> probs_;
};

/// One linear piece of a piecewise-linear convex value function.
template <typename Scalar>
struct AlphaVector {
  Vector<Scalar> coeffs;
  Index action = kNoAccess;

  Scalar dot(const BeliefVector<Scalar>& b) const { return coeffs.dot(b.probs()); }
};

/// Value function for one decision slot: J_k(b) = max over alphas of alpha . b
template <typename Scalar>
struct ValueFunctionStage {
  Index stage = 0;
  std::vector<AlphaVector<Scalar>> alphas;

  Scalar value(const BeliefVector<Scalar>& b) const {
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (const auto& a : alphas) best = std::max(best, a.dot(b));
    return best;
  }
};

/// Finite POMDP with an action-independent transition kernel.
///
/// `observation[a](s', o)` is the probability of symbol `o` when action `a` was
/// taken and the process moved to `s'`. `reward(s, a)` is the immediate reward.
/// `discount` is the factor beta used in the stage weights beta^(K-k-1).
template <typename Scalar>
class PomdpModel {
 public:
  PomdpModel(Matrix<Scalar> transition, std::vector<Matrix<Scalar>> observation,
             Matrix<Scalar> reward, Scalar discount)
      : transition_(std::move(transition)),
        observation_(std::move(observation)),
        reward_(std::move(reward)),
        discount_(discount) {
    validate();
  }

  Index state_count() const noexcept { return transition_.rows(); }
  Index action_count() const noexcept { return reward_.cols(); }
  Index observation_count() const noexcept { return observation_.front().cols(); }

  const Matrix<Scalar>& transition() const noexcept { return transition_; }
  const Matrix<Scalar>& observation(Index action) const { return observation_.at(action); }
  const Matrix<Scalar>& reward() const noexcept { return reward_; }
  Scalar discount() const noexcept { return discount_; }

  /// Same dynamics and observations with the reward table replaced.
  PomdpModel with_reward(Matrix<Scalar> reward) const {
    return PomdpModel(transition_, observation_, std::move(reward), discount_);
  }

  /// Same model, observation kernels replaced (e.g. noiseless sensing).
  PomdpModel with_observation(std::vector<Matrix<Scalar>> observation) const {
    return PomdpModel(transition_, std::move(observation), reward_, discount_);
  }

  /// Stationary distribution of the transition kernel.
  BeliefVector<Scalar> stationary() const {
    const Index n = state_count();
    Matrix<Scalar> a = transition_.transpose() - Matrix<Scalar>::Identity(n, n);
    a.row(n - 1).setOnes();
    Vector<Scalar> rhs = Vector<Scalar>::Zero(n);
    rhs[n - 1] = Scalar(1);
    Vector<Scalar> pi = a.colPivHouseholderQr().solve(rhs);
    pi = pi.cwiseMax(Scalar(0));
    const Scalar total = pi.sum();
    if (!(total > Scalar(0)) || !pi.allFinite()) return BeliefVector<Scalar>::uniform(n);
    pi /= total;
    return BeliefVector<Scalar>(pi);
  }

 private:
  void validate() const {
    const Index n = transition_.rows();
    if (n == 0 || transition_.cols() != n)
      throw DomainError("transition must be a non-empty square matrix");
    if (reward_.rows() != n || reward_.cols() < 1)
      throw DomainError("reward must have one row per state and at least one action");
    if (static_cast<Index>(observation_.size()) != reward_.cols())
      throw DomainError("need one observation kernel per action");
    if (!(discount_ >= Scalar(0) && discount_ <= Scalar(1)))
      throw DomainError("discount must lie in [0,1]");
    check_stochastic(transition_, "transition");
    const Index m = observation_.front().cols();
    for (const auto& o : observation_) {
      if (o.rows() != n || o.cols() != m || m == 0)
        throw DomainError("observation kernels must be |S| x |O| with a common |O|");
      check_stochastic(o, "observation");
    }
    if (!reward_.allFinite()) throw DomainError("reward entries must be finite");
    if (reward_.col(kNoAccess).cwiseAbs().maxCoeff() != Scalar(0))
      throw DomainError("no-access action must have zero reward in every state");
  }

  static void check_stochastic(const Matrix<Scalar>& m, const char* what) {
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        if (!(m(i, j) >= Scalar(0) && m(i, j) <= Scalar(1)))
          throw DomainError(std::string(what) + " entries must lie in [0,1]");
      }
      if (std::abs(static_cast<double>(m.row(i).sum()) - 1.0) > kStochasticTol)
        throw DomainError(std::string(what) + " rows must sum to 1");
    }
  }

  Matrix<Scalar> transition_;
  std::vector<Matrix<Scalar>> observation_;
  Matrix<Scalar> reward_;
  Scalar discount_;
};

}  // namespace m2m::pomdp

#pragma once

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "m2m/pomdp/model.hpp"
#include "m2m/pomdp/simplex.hpp"

namespace m2m::pomdp {

inline constexpr double kPruneTol = 1e-9;

namespace detail {

template <typename Scalar>
bool lex_less(const AlphaVector<Scalar>& x, const AlphaVector<Scalar>& y) {
  for (Index i = 0; i < x.coeffs.size(); ++i) {
    if (x.coeffs[i] < y.coeffs[i]) return true;
    if (y.coeffs[i] < x.coeffs[i]) return false;
  }
  return x.action < y.action;
}

// x >= y - tol componentwise.
template <typename Scalar>
bool weakly_dominates(const Vector<Scalar>& x, const Vector<Scalar>& y, Scalar tol) {
  return ((x - y).array() >= -tol).all();
}

// Removes vectors that are componentwise dominated (within tol) by another
// member. Among near-duplicates the lower action index survives.
template <typename Scalar>
std::vector<AlphaVector<Scalar>> pointwise_filter(std::vector<AlphaVector<Scalar>> in, Scalar tol) {
  std::stable_sort(in.begin(), in.end(), [](const auto& x, const auto& y) {
    if (x.action != y.action) return x.action < y.action;
    return x.coeffs.sum() > y.coeffs.sum();
  });
  std::vector<AlphaVector<Scalar>> kept;
  kept.reserve(in.size());
  for (auto& cand : in) {
    bool dominated = false;
    for (const auto& k : kept) {
      if (weakly_dominates(k.coeffs, cand.coeffs, tol)) {
        dominated = true;
        break;
      }
    }
    if (dominated) continue;
    std::erase_if(kept, [&](const auto& k) { return weakly_dominates(cand.coeffs, k.coeffs, tol); });
    kept.push_back(std::move(cand));
  }
  return kept;
}

// Index into `set` of the vector with the highest value at `b`; ties go to the
// lexicographically largest coefficients so the winner is a true facet.
template <typename Scalar>
std::size_t best_at(const std::vector<AlphaVector<Scalar>>& set, const Vector<Scalar>& b) {
  std::size_t best = 0;
  Scalar best_val = set[0].coeffs.dot(b);
  for (std::size_t i = 1; i < set.size(); ++i) {
    const Scalar v = set[i].coeffs.dot(b);
    if (v > best_val || (v == best_val && lex_less(set[best], set[i]))) {
      best = i;
      best_val = v;
    }
  }
  return best;
}

// Largest margin by which `alpha` beats every member of `against` somewhere on
// the simplex, together with the belief achieving it.
template <typename Scalar>
std::pair<Scalar, Vector<Scalar>> dominance_margin(const Vector<Scalar>& alpha,
                                                   const std::vector<AlphaVector<Scalar>>& against) {
  const Index s = alpha.size();
  if (s == 1) {
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (const auto& w : against) best = std::max(best, w.coeffs[0]);
    return {alpha[0] - best, Vector<Scalar>::Ones(1)};
  }
  // Variables: y_0..y_{s-2} (belief without its last entry) and d' = delta + big.
  const Index m = static_cast<Index>(against.size());
  Scalar big = Scalar(0);
  for (const auto& w : against) big = std::max(big, w.coeffs[s - 1] - alpha[s - 1]);
  big += Scalar(1);

  Matrix<Scalar> a(m + 1, s);
  Vector<Scalar> rhs(m + 1);
  for (Index j = 0; j < m; ++j) {
    const Vector<Scalar> d = against[j].coeffs - alpha;
    a.row(j).head(s - 1) = (d.head(s - 1).array() - d[s - 1]).matrix().transpose();
    a(j, s - 1) = Scalar(1);
    rhs[j] = big - d[s - 1];
  }
  a.row(m).head(s - 1).setOnes();
  a(m, s - 1) = Scalar(0);
  rhs[m] = Scalar(1);
  Vector<Scalar> c = Vector<Scalar>::Zero(s);
  c[s - 1] = Scalar(1);

  const auto sol = maximize<Scalar>(a, rhs, c);
  Vector<Scalar> b(s);
  b.head(s - 1) = sol.x.head(s - 1).cwiseMax(Scalar(0));
  b[s - 1] = std::max(Scalar(0), Scalar(1) - b.head(s - 1).sum());
  b /= b.sum();
  return {sol.objective - big, b};
}

}  // namespace detail

/// Minimal subset of `alphas` with the same upper surface over the belief
/// simplex (within `tol`). Output is sorted lexicographically by coefficients.
template <typename Scalar>
std::vector<AlphaVector<Scalar>> prune(std::vector<AlphaVector<Scalar>> alphas,
                                       Scalar tol = Scalar(kPruneTol)) {
  if (alphas.empty()) throw DomainError("prune needs a non-empty set");
  const Index n = alphas.front().coeffs.size();
  auto frontier = detail::pointwise_filter(std::move(alphas), tol);

  std::vector<AlphaVector<Scalar>> kept;
  // Seed with the best vector at each simplex corner.
  for (Index s = 0; s < n && !frontier.empty(); ++s) {
    const auto i = detail::best_at(frontier, Vector<Scalar>(Vector<Scalar>::Unit(n, s)));
    bool covered = false;
    for (const auto& k : kept) covered = covered || k.coeffs[s] >= frontier[i].coeffs[s] - tol;
    if (covered) continue;
    kept.push_back(std::move(frontier[i]));
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(i));
  }

  // Lark's filter: each candidate either gets a witness belief (and the best
  // vector there is promoted) or is discarded.
  while (!frontier.empty()) {
    const auto [margin, witness] = detail::dominance_margin(frontier.back().coeffs, kept);
    if (margin <= tol) {
      frontier.pop_back();
      continue;
    }
    const auto i = detail::best_at(frontier, witness);
    kept.push_back(std::move(frontier[i]));
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(i));
  }

  std::sort(kept.begin(), kept.end(), detail::lex_less<Scalar>);
  return kept;
}

}  // namespace m2m::pomdp

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "m2m/pomdp/model.hpp"

namespace m2m::pomdp::detail {

template <typename Scalar>
struct LpSolution {
  bool bounded = true;
  Scalar objective = Scalar(0);
  Vector<Scalar> x;
};

/// Dense condensed-tableau simplex for
///
///   maximize c.x  subject to  A x <= b,  x >= 0,
///
/// with b >= 0 so the origin is a feasible starting vertex. Uses Dantzig's rule
/// and falls back to Bland's rule after a run of degenerate pivots.
template <typename Scalar>
LpSolution<Scalar> maximize(const Matrix<Scalar>& a, const Vector<Scalar>& b,
                            const Vector<Scalar>& c, Scalar eps = Scalar(1e-12)) {
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix<Scalar> t(m + 1, n + 1);
  t.topLeftCorner(m, n) = a;
  t.topRightCorner(m, 1) = b;
  t.bottomLeftCorner(1, n) = -c.transpose();
  t(m, n) = Scalar(0);

  // Labels: 0..n-1 are structural variables, n..n+m-1 are slacks.
  std::vector<Index> nonbasic(static_cast<std::size_t>(n));
  std::vector<Index> basic(static_cast<std::size_t>(m));
  for (Index j = 0; j < n; ++j) nonbasic[j] = j;
  for (Index i = 0; i < m; ++i) basic[i] = n + i;

  bool bland = false;
  int degenerate_run = 0;
  const Index max_iter = 50 * (m + n) + 100;
  LpSolution<Scalar> out;

  for (Index iter = 0; iter < max_iter; ++iter) {
    Index enter = -1;
    if (bland) {
      for (Index j = 0; j < n; ++j) {
        if (t(m, j) < -eps && (enter < 0 || nonbasic[j] < nonbasic[enter])) enter = j;
      }
    } else {
      Scalar most = -eps;
      for (Index j = 0; j < n; ++j) {
        if (t(m, j) < most) {
          most = t(m, j);
          enter = j;
        }
      }
    }
    if (enter < 0) break;

    Index leave = -1;
    Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        const Scalar ratio = t(i, n) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - eps) {
          best_ratio = ratio;
          leave = i;
        } else if (ratio <= best_ratio + eps && basic[i] < basic[leave]) {
          leave = i;
        }
      }
    }
    if (leave < 0) {
      out.bounded = false;
      return out;
    }
    if (best_ratio <= eps) {
      if (++degenerate_run > 20) bland = true;
    } else {
      degenerate_run = 0;
    }

    const Scalar pivot = t(leave, enter);
    const Vector<Scalar> col = t.col(enter);
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row = t.row(leave) / pivot;
    t.noalias() -= col * row;
    t.row(leave) = row;
    t.col(enter) = -col / pivot;
    t(leave, enter) = Scalar(1) / pivot;
    std::swap(basic[leave], nonbasic[enter]);
  }

  out.objective = t(m, n);
  out.x = Vector<Scalar>::Zero(n);
  for (Index i = 0; i < m; ++i) {
    if (basic[i] < n) out.x[basic[i]] = t(i, n);
  }
  return out;
}

}  // namespace m2m::pomdp::detail

#pragma once

#include "corrlearn/types.hpp"

namespace corrlearn {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vec x;
  double value = 0.0;
};

/// maximize c^T x subject to A x <= b, x >= 0.
///
/// Dense two-phase tableau simplex with Bland's pivoting rule. Meant for the
/// small programs that arise in polytope centering and pruning (tens of rows,
/// a handful of columns).
LpResult solve_lp(const Vec& c, const Mat& A, const Vec& b, double tol = 1e-10);

}  // namespace corrlearn

#pragma once

#include "corrlearn/types.hpp"

namespace corrlearn {

/// The set {theta : <normal, theta> + offset <= 0}.
///
/// Corrections yield strict inequalities; they are stored closed because the
/// boundary has measure zero for every geometric quantity computed here.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  double value(const Vec& theta) const { return normal.dot(theta) + offset; }
  bool contains(const Vec& theta, double tol = 1e-12) const { return value(theta) <= tol; }
  /// Same set with a unit-length normal. Throws on a zero normal.
  Halfspace normalized() const;
};

inline Halfspace Halfspace::normalized() const {
  const double n = normal.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("halfspace: normal must be nonzero and finite");
  return {normal / n, offset / n};
}

}  // namespace corrlearn

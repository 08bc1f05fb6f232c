#include "corrlearn/lp.hpp"

#include <limits>
#include <vector>

namespace corrlearn {

namespace {

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : T_(Mat::Zero(rows + 1, cols + 1)), basis_(rows) {}

  double& at(Eigen::Index i, Eigen::Index j) { return T_(i, j); }
  double rhs(Eigen::Index i) const { return T_(i, T_.cols() - 1); }
  double& rhs(Eigen::Index i) { return T_(i, T_.cols() - 1); }
  Eigen::Index rows() const { return T_.rows() - 1; }
  Eigen::Index cols() const { return T_.cols() - 1; }
  Eigen::Index obj() const { return T_.rows() - 1; }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    T_.row(r) /= T_(r, c);
    for (Eigen::Index i = 0; i < T_.rows(); ++i) {
      if (i != r && T_(i, c) != 0.0) T_.row(i) -= T_(i, c) * T_.row(r);
    }
    basis_[r] = c;
  }

  // Runs Bland's rule on the objective row until optimal. Columns at or
  // beyond `allowed` never enter. Returns false if unbounded.
  bool optimize(Eigen::Index allowed, double tol) {
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (T_(obj(), j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows(); ++i) {
        if (T_(i, enter) > tol) {
          const double ratio = rhs(i) / T_(i, enter);
          if (leave < 0 || ratio < best - tol || (ratio <= best + tol && basis_[i] < basis_[leave])) {
            best = std::min(best, ratio);
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw ConvergenceError("simplex: pivot limit reached", 0.0);
  }

 private:
  Mat T_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_lp(const Vec& c, const Mat& A, const Vec& b, double tol) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (c.size() != n || b.size() != m) throw DimensionError("solve_lp: inconsistent shapes");

  Eigen::Index n_art = 0;
  for (Eigen::Index i = 0; i < m; ++i) n_art += b(i) < 0.0 ? 1 : 0;

  // Columns: [x (n) | slack (m) | artificial (n_art)].
  Tableau tab(m, n + m + n_art);
  Eigen::Index art = n + m;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) tab.at(i, j) = sign * A(i, j);
    tab.at(i, n + i) = sign;
    tab.rhs(i) = sign * b(i);
    if (sign < 0.0) {
      tab.at(i, art) = 1.0;
      tab.basis()[i] = art++;
    } else {
      tab.basis()[i] = n + i;
    }
  }

  if (n_art > 0) {
    // Phase one: maximize -sum(artificials), expressed in reduced costs.
    for (Eigen::Index j = n + m; j < n + m + n_art; ++j) tab.at(tab.obj(), j) = 1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab.basis()[i] >= n + m) {
        for (Eigen::Index j = 0; j <= tab.cols(); ++j) tab.at(tab.obj(), j) -= tab.at(i, j);
      }
    }
    tab.optimize(tab.cols(), tol);
    if (-tab.rhs(tab.obj()) > std::max(tol, 1e-9 * (1.0 + b.cwiseAbs().maxCoeff()))) {
      return {LpStatus::infeasible, Vec(), 0.0};
    }
    // Drive leftover artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab.basis()[i] < n + m) continue;
      for (Eigen::Index j = 0; j < n + m; ++j) {
        if (std::abs(tab.at(i, j)) > tol) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase two.
  for (Eigen::Index j = 0; j <= tab.cols(); ++j) tab.at(tab.obj(), j) = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) tab.at(tab.obj(), j) = -c(j);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = tab.basis()[i];
    const double coef = tab.at(tab.obj(), bj);
    if (coef != 0.0) {
      for (Eigen::Index j = 0; j <= tab.cols(); ++j) tab.at(tab.obj(), j) -= coef * tab.at(i, j);
    }
  }
  if (!tab.optimize(n + m, tol)) return {LpStatus::unbounded, Vec(), 0.0};

  LpResult out{LpStatus::optimal, Vec::Zero(n), 0.0};
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[i] < n) out.x(tab.basis()[i]) = std::max(0.0, tab.rhs(i));
  }
  out.value = c.dot(out.x);
  return out;
}

}  // namespace corrlearn

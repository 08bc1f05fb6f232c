#include "corrlearn/polytope.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace corrlearn {

double Ellipsoid::log_det() const {
  Eigen::LLT<Mat> llt(shape);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

namespace {

// Symmetric B is parametrized by its lower triangle b = vech(B). Each entry
// b_a corresponds to the basis matrix E_a (e_j e_k^T + e_k e_j^T, or e_j e_j^T
// on the diagonal).
class SymmetricBasis {
 public:
  explicit SymmetricBasis(int r) : r_(r) {
    for (int k = 0; k < r; ++k) {
      for (int j = k; j < r; ++j) index_.emplace_back(j, k);
    }
  }

  int size() const { return static_cast<int>(index_.size()); }
  const std::pair<int, int>& at(int a) const { return index_[a]; }

  Mat to_matrix(const Vec& b) const {
    Mat B = Mat::Zero(r_, r_);
    for (int a = 0; a < size(); ++a) {
      const auto [j, k] = index_[a];
      B(j, k) = b(a);
      B(k, j) = b(a);
    }
    return B;
  }

  Vec from_matrix(const Mat& B) const {
    Vec b(size());
    for (int a = 0; a < size(); ++a) b(a) = B(index_[a].first, index_[a].second);
    return b;
  }

  // W with B g = W b.
  Mat apply_matrix(const Vec& g) const {
    Mat W = Mat::Zero(r_, size());
    for (int a = 0; a < size(); ++a) {
      const auto [j, k] = index_[a];
      W(j, a) += g(k);
      if (j != k) W(k, a) += g(j);
    }
    return W;
  }

 private:
  int r_;
  std::vector<std::pair<int, int>> index_;
};

// Log-barrier centering problem
//   minimize  -t log det B - sum_i log(c_i - g_i^T d - |B g_i|)
// over z = [vech(B); d], or over vech(B) alone when d is pinned.
class MveBarrier {
 public:
  MveBarrier(const SearchSpace& space, bool free_center, Vec pinned_center)
      : G_(space.row_matrix()),
        c_(space.row_rhs()),
        r_(space.dim()),
        basis_(space.dim()),
        free_center_(free_center),
        pinned_(std::move(pinned_center)) {
    W_.reserve(G_.rows());
    for (Eigen::Index i = 0; i < G_.rows(); ++i) W_.push_back(basis_.apply_matrix(G_.row(i).transpose()));
  }

  int q() const { return basis_.size(); }
  int vars() const { return q() + (free_center_ ? r_ : 0); }
  int rows() const { return static_cast<int>(G_.rows()); }
  const SymmetricBasis& basis() const { return basis_; }

  Mat shape(const Vec& z) const { return basis_.to_matrix(z.head(q())); }
  Vec center(const Vec& z) const { return free_center_ ? Vec(z.tail(r_)) : pinned_; }

  // Objective value, or nullopt outside the domain.
  std::optional<double> value(const Vec& z, double t) const {
    const Mat B = shape(z);
    Eigen::LLT<Mat> llt(B);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Mat L = llt.matrixL();
    const double logdet = 2.0 * L.diagonal().array().log().sum();
    if (!std::isfinite(logdet)) return std::nullopt;
    const Vec d = center(z);
    double f = -t * logdet;
    for (int i = 0; i < rows(); ++i) {
      const double s = c_(i) - G_.row(i).dot(d) - (B * G_.row(i).transpose()).norm();
      if (!(s > 0.0)) return std::nullopt;
      f -= std::log(s);
    }
    return f;
  }

  // Gradient and Hessian at a point inside the domain.
  void derivatives(const Vec& z, double t, Vec& grad, Mat& hess) const {
    const int n = vars();
    grad = Vec::Zero(n);
    hess = Mat::Zero(n, n);
    const Mat B = shape(z);
    const Mat Binv = B.llt().solve(Mat::Identity(r_, r_));

    // -t log det B
    std::vector<Mat> M(q());
    for (int a = 0; a < q(); ++a) {
      const auto [j, k] = basis_.at(a);
      Mat Ea = Mat::Zero(r_, r_);
      Ea(j, k) = 1.0;
      Ea(k, j) = 1.0;
      M[a] = Binv * Ea;
      grad(a) -= t * M[a].trace();
    }
    for (int a = 0; a < q(); ++a) {
      for (int b = a; b < q(); ++b) {
        const double v = t * (M[a].cwiseProduct(M[b].transpose())).sum();
        hess(a, b) += v;
        if (a != b) hess(b, a) += v;
      }
    }

    // Barrier rows.
    const Vec d = center(z);
    for (int i = 0; i < rows(); ++i) {
      const Vec g = G_.row(i).transpose();
      const Vec y = B * g;
      const double ny = y.norm();
      const double s = c_(i) - g.dot(d) - ny;
      const Vec u = y / ny;
      Vec w = Vec::Zero(n);
      w.head(q()) = W_[i].transpose() * u;
      if (free_center_) w.tail(r_) = g;
      grad += w / s;
      hess += (w * w.transpose()) / (s * s);
      const Mat proj = (Mat::Identity(r_, r_) - u * u.transpose()) / ny;
      hess.topLeftCorner(q(), q()) += W_[i].transpose() * proj * W_[i] / s;
    }
  }

 private:
  Mat G_;
  Vec c_;
  int r_;
  SymmetricBasis basis_;
  std::vector<Mat> W_;
  bool free_center_;
  Vec pinned_;
};

MveReport barrier_solve(const MveBarrier& problem, Vec z, const MveOptions& opts) {
  const double m = problem.rows();
  double t = 1.0;
  int steps = 0;
  Vec grad;
  Mat hess;
  while (true) {
    for (int it = 0; it < opts.max_newton_steps; ++it) {
      const double f = *problem.value(z, t);
      problem.derivatives(z, t, grad, hess);
      Eigen::LDLT<Mat> ldlt(hess);
      const Vec step = -ldlt.solve(grad);
      const double decrement2 = -grad.dot(step);
      if (!std::isfinite(decrement2)) throw NonFiniteError("mve: Newton system is not finite");
      if (decrement2 / 2.0 <= opts.newton_tolerance) break;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
        const auto fn = problem.value(z + alpha * step, t);
        if (fn && *fn <= f - 0.25 * alpha * decrement2) {
          moved = true;
          break;
        }
      }
      if (!moved) break;  // roundoff floor
      z += alpha * step;
      ++steps;
    }
    if (m / t <= opts.gap_tolerance) break;
    t *= 10.0;
  }
  return {{problem.shape(z), problem.center(z)}, m / t, steps};
}

}  // namespace

MveReport mve_solve(const SearchSpace& space, const MveOptions& opts) {
  const Ball ball = chebyshev_center(space);
  const double scale = space.box().radius() + 1.0;
  if (ball.radius <= 1e-10 * scale) throw InfeasibleError("search space has no interior");
  const MveBarrier problem(space, true, Vec());
  Vec z(problem.vars());
  z.head(problem.q()) = problem.basis().from_matrix(0.5 * ball.radius * Mat::Identity(space.dim(), space.dim()));
  z.tail(space.dim()) = ball.center;
  return barrier_solve(problem, z, opts);
}

Ellipsoid mve_center(const SearchSpace& space, const MveOptions& opts) {
  return mve_solve(space, opts).ellipsoid;
}

MveReport mve_fixed_center(const SearchSpace& space, const Vec& center, const MveOptions& opts) {
  require_dim(center, space.dim(), "center");
  const Mat G = space.row_matrix();
  const Vec slack = space.row_rhs() - G * center;
  const double radius = (slack.array() / G.rowwise().norm().array()).minCoeff();
  if (!(radius > 0.0)) throw InfeasibleError("mve: pinned center is not strictly interior");
  const MveBarrier problem(space, false, center);
  const Vec z = problem.basis().from_matrix(0.5 * radius * Mat::Identity(space.dim(), space.dim()));
  return barrier_solve(problem, z, opts);
}

}  // namespace corrlearn

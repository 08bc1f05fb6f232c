#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "corrlearn/polytope.hpp"

namespace corrlearn::testing {

// Random 2D polytope: the box [-1, 1]^2 plus 1..6 cuts at random distances
// from the origin, so it always contains a disc around 0.
inline SearchSpace random_polygon(std::mt19937_64& rng, int cuts) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI), dist(0.15, 0.9);
  SearchSpace s = SearchSpace::from_box(BoxBounds::uniform(2, -1.0, 1.0));
  for (int i = 0; i < cuts; ++i) {
    const double a = angle(rng);
    s = s.add_cut({(Vec(2) << std::cos(a), std::sin(a)).finished(), -dist(rng)});
  }
  return s;
}

// log area (up to a constant) of the largest ellipse centered at d with
// unit-determinant shape R(phi) diag(e^k, e^-k) R(phi)^T: the scale is set by
// the tightest row, s = min_i slack_i / |B g_i|.
inline double ellipse_log_area(const Mat& G, const Vec& c, const Vec& d, double phi, double k) {
  const Eigen::Matrix2d R = Eigen::Rotation2Dd(phi).toRotationMatrix();
  const Eigen::Matrix2d B = R * Eigen::Vector2d(std::exp(k), std::exp(-k)).asDiagonal() * R.transpose();
  double s = INFINITY;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    const Eigen::Vector2d g = G.row(i).transpose();
    const double slack = c(i) - g.dot(d);
    if (slack <= 0.0) return -INFINITY;
    s = std::min(s, slack / (B * g).norm());
  }
  return 2.0 * std::log(s);
}

// Maximizes f over a 2D box: a grid, then shrinking 9x9 local grids around
// each of the best few grid points.
template <class F>
Eigen::Vector2d grid_maximize(F f, Eigen::Vector2d lo, Eigen::Vector2d hi, int coarse, int levels,
                              int starts = 1) {
  std::vector<std::pair<double, Eigen::Vector2d>> grid;
  for (int i = 0; i <= coarse; ++i) {
    for (int j = 0; j <= coarse; ++j) {
      const Eigen::Vector2d p = lo + Eigen::Vector2d(i * (hi.x() - lo.x()) / coarse, j * (hi.y() - lo.y()) / coarse);
      grid.emplace_back(f(p), p);
    }
  }
  std::partial_sort(grid.begin(), grid.begin() + starts, grid.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  Eigen::Vector2d best = grid.front().second;
  double best_v = grid.front().first;
  for (int s = 0; s < starts; ++s) {
    Eigen::Vector2d p0 = grid[s].second;
    double v0 = grid[s].first;
    Eigen::Vector2d step = (hi - lo) / coarse;
    for (int level = 0; level < levels; ++level) {
      const Eigen::Vector2d center = p0;
      for (int i = -4; i <= 4; ++i) {
        for (int j = -4; j <= 4; ++j) {
          const Eigen::Vector2d p = center + Eigen::Vector2d(i * step.x(), j * step.y()) / 4.0;
          const double v = f(p);
          if (v > v0) v0 = v, p0 = p;
        }
      }
      step /= 2.0;
    }
    if (v0 > best_v) best_v = v0, best = p0;
  }
  return best;
}

// Shapes are searched in (k cos 2 phi, k sin 2 phi), which stays smooth
// through the circle k = 0.
inline double best_shape_log_area(const Mat& G, const Vec& c, const Vec& d) {
  auto f = [&](const Eigen::Vector2d& p) {
    return ellipse_log_area(G, c, d, 0.5 * std::atan2(p.y(), p.x()), p.norm());
  };
  const Eigen::Vector2d s = grid_maximize(f, {-3.0, -3.0}, {3.0, 3.0}, 20, 12, 2);
  return f(s);
}

inline Vec mve_center_oracle(const SearchSpace& space) {
  const Mat G = space.row_matrix();
  const Vec c = space.row_rhs();
  auto f = [&](const Eigen::Vector2d& d) { return best_shape_log_area(G, c, d); };
  return grid_maximize(f, {-1.0, -1.0}, {1.0, 1.0}, 12, 10);
}

}  // namespace corrlearn::testing

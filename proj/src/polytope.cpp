#include "corrlearn/polytope.hpp"

#include <cmath>
#include <random>

#include "corrlearn/lp.hpp"

namespace corrlearn {

BoxBounds::BoxBounds(Vec lower_, Vec upper_) : lower(std::move(lower_)), upper(std::move(upper_)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw DimensionError("box bounds: lower and upper must have the same nonzero length");
  }
  if (!lower.allFinite() || !upper.allFinite()) throw NonFiniteError("box bounds: non-finite bound");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) < upper(i))) {
      throw Error("box bounds: lower must be strictly below upper in coordinate " + std::to_string(i));
    }
  }
}

BoxBounds BoxBounds::uniform(int dim, double lo, double hi) {
  return BoxBounds(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
}

double BoxBounds::radius() const {
  return std::max(lower.cwiseAbs().maxCoeff(), upper.cwiseAbs().maxCoeff());
}

double BoxBounds::volume() const { return (upper - lower).prod(); }

// ---------------------------------------------------------------------------

SearchSpace SearchSpace::from_box(const BoxBounds& box) {
  SearchSpace s;
  s.box_ = BoxBounds(box.lower, box.upper);
  const int r = box.dim();
  for (int i = 0; i < r; ++i) {
    Vec e = Vec::Unit(r, i);
    s.rows_.push_back({{e, -box.upper(i)}, RowKind::box});
    s.rows_.push_back({{-e, box.lower(i)}, RowKind::box});
  }
  return s;
}

SearchSpace SearchSpace::add_cut(const Halfspace& cut) const {
  require_dim(cut.normal, dim(), "cut normal");
  SearchSpace next = *this;
  next.rows_.push_back({cut.normalized(), RowKind::cut});
  return next;
}

bool SearchSpace::contains(const Vec& theta, double tol) const {
  require_dim(theta, dim(), "theta");
  for (const auto& row : rows_) {
    if (!row.halfspace.contains(theta, tol)) return false;
  }
  return true;
}

size_t SearchSpace::cut_count() const {
  size_t n = 0;
  for (const auto& row : rows_) n += row.kind == RowKind::cut ? 1 : 0;
  return n;
}

Mat SearchSpace::row_matrix() const {
  Mat G(rows_.size(), dim());
  for (size_t i = 0; i < rows_.size(); ++i) G.row(i) = rows_[i].halfspace.normal.transpose();
  return G;
}

Vec SearchSpace::row_rhs() const {
  Vec c(rows_.size());
  for (size_t i = 0; i < rows_.size(); ++i) c(i) = -rows_[i].halfspace.offset;
  return c;
}

SearchSpace SearchSpace::with_rows(std::vector<Row> rows) const {
  SearchSpace s;
  s.box_ = box_;
  s.rows_ = std::move(rows);
  return s;
}

// ---------------------------------------------------------------------------

namespace {

// LP over theta written as theta = shift + z with z >= 0. `shift` must be a
// valid lower bound on every point of interest.
LpResult lp_over_space(const Vec& objective, const Mat& G, const Vec& c, const Vec& shift) {
  return solve_lp(objective, G, c - G * shift, 1e-11);
}

}  // namespace

Ball chebyshev_center(const SearchSpace& space) {
  const Mat G = space.row_matrix();
  const Vec c = space.row_rhs();
  const int r = space.dim();
  // Variables [z; rho].
  Mat A(G.rows(), r + 1);
  A.leftCols(r) = G;
  A.col(r) = G.rowwise().norm();
  Vec obj = Vec::Zero(r + 1);
  obj(r) = 1.0;
  const Vec shift = space.box().lower;
  LpResult res = solve_lp(obj, A, c - G * shift, 1e-11);
  if (res.status == LpStatus::infeasible) throw InfeasibleError("search space is empty");
  if (res.status == LpStatus::unbounded) throw Error("chebyshev center: unbounded polytope");
  return {shift + res.x.head(r), res.x(r)};
}

AnalyticCenterReport analytic_center_report(const SearchSpace& space) {
  const Mat G = space.row_matrix();
  const Vec c = space.row_rhs();
  const Ball ball = chebyshev_center(space);
  const double scale = space.box().radius() + 1.0;
  if (ball.radius <= 1e-10 * scale) throw InfeasibleError("search space has no interior");

  auto barrier = [&](const Vec& th, double& f) {
    const Vec s = c - G * th;
    if ((s.array() <= 0.0).any()) return false;
    f = -s.array().log().sum();
    return true;
  };

  Vec theta = ball.center;
  double f = 0.0;
  barrier(theta, f);
  double gnorm = 0.0;
  for (int it = 0; it < 500; ++it) {
    const Vec s = c - G * theta;
    const Vec inv = s.cwiseInverse();
    const Vec grad = G.transpose() * inv;
    gnorm = grad.norm();
    if (gnorm <= 1e-9) break;
    const Mat H = G.transpose() * inv.cwiseAbs2().asDiagonal() * G;
    const Vec step = -H.ldlt().solve(grad);
    const double slope = grad.dot(step);
    if (-slope < 1e-26) break;
    double alpha = 1.0, fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      if (barrier(theta + alpha * step, fn) && fn <= f + 0.25 * alpha * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Roundoff floor: take the full Newton step if it stays interior and
      // shrinks the gradient.
      const Vec cand = theta + step;
      if (!barrier(cand, fn)) break;
      const Vec sc = c - G * cand;
      if ((G.transpose() * sc.cwiseInverse()).norm() >= gnorm) break;
      alpha = 1.0;
    }
    theta += alpha * step;
    f = fn;
  }
  const Vec s = c - G * theta;
  return {theta, (G.transpose() * s.cwiseInverse()).norm()};
}

Vec analytic_center(const SearchSpace& space) { return analytic_center_report(space).center; }

// ---------------------------------------------------------------------------

VolumeEstimate estimate_volume(const SearchSpace& space, size_t samples, std::uint64_t seed,
                               const std::optional<BoxBounds>& envelope) {
  if (samples == 0) throw Error("estimate_volume: at least one sample is required");
  const BoxBounds& env = envelope ? *envelope : space.box();
  require_dim(env.lower, space.dim(), "envelope");
  const Mat G = space.row_matrix();
  const Vec c = space.row_rhs();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec theta(space.dim());
  size_t accepted = 0;
  for (size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < space.dim(); ++i) {
      theta(i) = env.lower(i) + (env.upper(i) - env.lower(i)) * unit(rng);
    }
    if (((G * theta - c).array() <= 1e-12).all()) ++accepted;
  }
  const double p = static_cast<double>(accepted) / static_cast<double>(samples);
  const double v = env.volume();
  return {v * p, v * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples, accepted};
}

BoxBounds bounding_box(const SearchSpace& space) {
  const Mat G = space.row_matrix();
  const Vec c = space.row_rhs();
  const int r = space.dim();
  const Vec shift = space.box().lower;
  Vec lo(r), hi(r);
  for (int i = 0; i < r; ++i) {
    for (double sign : {1.0, -1.0}) {
      LpResult res = lp_over_space(sign * Vec::Unit(r, i), G, c, shift);
      if (res.status != LpStatus::optimal) throw InfeasibleError("bounding box: search space is empty");
      const double v = shift(i) + res.x(i);
      (sign > 0 ? hi(i) : lo(i)) = v;
    }
  }
  // Flat directions get a sliver of width so the box stays valid.
  for (int i = 0; i < r; ++i) {
    if (!(lo(i) < hi(i))) {
      lo(i) -= 1e-12;
      hi(i) += 1e-12;
    }
  }
  return BoxBounds(lo, hi);
}

SearchSpace prune_redundant(const SearchSpace& space) {
  // Loose lower bound on every point near the polytope; box rows are tested like cut rows.
  const Vec shift = space.box().lower.array() - (space.box().upper - space.box().lower).array() - 1.0;
  chebyshev_center(space);  // throws on an empty space

  std::vector<SearchSpace::Row> kept = space.rows();
  for (size_t j = kept.size(); j-- > 0;) {
    std::vector<SearchSpace::Row> others;
    others.reserve(kept.size() - 1);
    for (size_t i = 0; i < kept.size(); ++i) {
      if (i != j) others.push_back(kept[i]);
    }
    if (others.empty()) continue;
    const SearchSpace rest = space.with_rows(others);
    const Halfspace& row = kept[j].halfspace;
    LpResult res = lp_over_space(row.normal, rest.row_matrix(), rest.row_rhs(), shift);
    if (res.status != LpStatus::optimal) continue;
    const double max_value = row.normal.dot(shift + res.x);
    if (max_value <= -row.offset + 1e-9) kept = std::move(others);
  }
  return space.with_rows(std::move(kept));
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const SearchSpace& space) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : space.rows()) {
    rows.push_back({{"kind", row.kind == SearchSpace::RowKind::box ? "box" : "cut"},
                    {"normal", std::vector<double>(row.halfspace.normal.data(),
                                                   row.halfspace.normal.data() + row.halfspace.normal.size())},
                    {"offset", row.halfspace.offset}});
  }
  const auto& box = space.box();
  return {{"lower", std::vector<double>(box.lower.data(), box.lower.data() + box.lower.size())},
          {"upper", std::vector<double>(box.upper.data(), box.upper.data() + box.upper.size())},
          {"rows", rows}};
}

SearchSpace search_space_from_json(const nlohmann::json& j) {
  auto to_vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  const SearchSpace base = SearchSpace::from_box(BoxBounds(to_vec(j.at("lower")), to_vec(j.at("upper"))));
  if (!j.contains("rows")) return base;
  std::vector<SearchSpace::Row> rows;
  for (const auto& row : j.at("rows")) {
    Halfspace h{to_vec(row.at("normal")), row.at("offset").get<double>()};
    require_dim(h.normal, base.dim(), "row normal");
    const auto kind = row.value("kind", std::string("cut")) == "box" ? SearchSpace::RowKind::box
                                                                    : SearchSpace::RowKind::cut;
    rows.push_back({h.normalized(), kind});
  }
  return base.with_rows(std::move(rows));
}

}  // namespace corrlearn

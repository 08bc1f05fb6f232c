#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "corrlearn/halfspace.hpp"
#include "corrlearn/types.hpp"

namespace corrlearn {

/// Per-coordinate bounds lower_i <= theta_i <= upper_i.
struct BoxBounds {
  Vec lower;
  Vec upper;

  BoxBounds() = default;
  /// Throws unless lower < upper everywhere and the lengths agree.
  BoxBounds(Vec lower_, Vec upper_);
  static BoxBounds uniform(int dim, double lower, double upper);

  int dim() const { return static_cast<int>(lower.size()); }
  /// Largest bound magnitude; the radius that enters the iteration bound.
  double radius() const;
  double volume() const;
  Vec center() const { return 0.5 * (lower + upper); }
};

/// Convex polytope {theta : g_i^T theta <= c_i}: the box rows followed by the
/// accepted cuts. Values are immutable; add_cut returns a new space.
class SearchSpace {
 public:
  enum class RowKind { box, cut };

  struct Row {
    Halfspace halfspace;  // unit normal
    RowKind kind = RowKind::cut;
  };

  static SearchSpace from_box(const BoxBounds& box);

  SearchSpace add_cut(const Halfspace& cut) const;
  bool contains(const Vec& theta, double tol = 1e-12) const;

  int dim() const { return box_.dim(); }
  const BoxBounds& box() const { return box_; }
  const std::vector<Row>& rows() const { return rows_; }
  size_t row_count() const { return rows_.size(); }
  size_t cut_count() const;

  /// Inequality form G theta <= c.
  Mat row_matrix() const;
  Vec row_rhs() const;

  /// Keeps only the listed rows, in order. Used by redundancy pruning.
  SearchSpace with_rows(std::vector<Row> rows) const;

 private:
  BoxBounds box_;
  std::vector<Row> rows_;
};

/// {B u + d : |u| <= 1}.
struct Ellipsoid {
  Mat shape;   // B, symmetric positive definite
  Vec center;  // d
  double log_det() const;
};

struct MveOptions {
  double gap_tolerance = 1e-8;      // stop once rows / t drops below this
  double newton_tolerance = 1e-10;  // half the squared Newton decrement
  int max_newton_steps = 200;
};

struct MveReport {
  Ellipsoid ellipsoid;
  double duality_gap = 0.0;
  int newton_steps = 0;
};

/// Maximum-volume ellipsoid inscribed in the polytope. Throws InfeasibleError
/// when the polytope is empty or has no interior.
Ellipsoid mve_center(const SearchSpace& space, const MveOptions& opts = {});
MveReport mve_solve(const SearchSpace& space, const MveOptions& opts = {});

/// Largest-volume ellipsoid inscribed in the polytope with its centre pinned
/// at `center`, which must be strictly interior.
MveReport mve_fixed_center(const SearchSpace& space, const Vec& center, const MveOptions& opts = {});

struct AnalyticCenterReport {
  Vec center;
  double gradient_norm = 0.0;
};

/// argmin -sum log(c_i - g_i^T theta).
Vec analytic_center(const SearchSpace& space);
AnalyticCenterReport analytic_center_report(const SearchSpace& space);

struct Ball {
  Vec center;
  double radius = 0.0;
};

/// Centre of the largest inscribed Euclidean ball. Radius 0 means the polytope
/// is nonempty but flat; an empty polytope throws InfeasibleError.
Ball chebyshev_center(const SearchSpace& space);

struct VolumeEstimate {
  double volume = 0.0;
  double std_error = 0.0;
  size_t samples = 0;
  size_t accepted = 0;
};

/// Rejection-sampling volume estimate. Samples are drawn uniformly from
/// `envelope` (default: the space's box), which must contain the polytope.
VolumeEstimate estimate_volume(const SearchSpace& space, size_t samples, std::uint64_t seed,
                               const std::optional<BoxBounds>& envelope = std::nullopt);

/// Tightest axis-aligned box containing the polytope (2 r linear programs).
BoxBounds bounding_box(const SearchSpace& space);

/// Removes rows implied by the remaining ones. Membership is unchanged.
SearchSpace prune_redundant(const SearchSpace& space);

nlohmann::json to_json(const SearchSpace& space);
SearchSpace search_space_from_json(const nlohmann::json& j);

}  // namespace corrlearn

#pragma once

#include <vector>

#include "oco/rng.hpp"
#include "oco/vec.hpp"

namespace oco {

inline constexpr double kMembershipTol = 1e-9;

enum class Shape { kBox, kBall, kSimplex };

// Compact convex feasible set with exact projection. Three shapes are
// supported: axis-aligned boxes, Euclidean balls, and the probability
// simplex. Shrinking toward the interior center keeps each shape closed
// under the operation (the simplex carries an explicit scale factor).
// Instances are immutable after construction and safe to share across
// threads.
class ConvexDomain {
 public:
  static ConvexDomain box(Vec lo, Vec hi);
  static ConvexDomain ball(Vec center, double radius);
  static ConvexDomain simplex(int dim);

  Shape shape() const { return shape_; }
  int ambient_dim() const { return d_; }
  // Dimension of the affine hull direction space L0.
  int hull_dim() const { return k_; }
  const Vec& interior_center() const { return center_; }
  // Radius of the largest hull-relative ball centered at interior_center().
  double interior_radius() const { return inradius_; }
  double diameter() const { return diameter_; }
  // Orthonormal basis of L0 (hull_dim vectors of length ambient_dim).
  const std::vector<Vec>& hull_basis() const { return basis_; }

  Vec project(const Vec& x) const;
  bool contains(const Vec& x, double tol = kMembershipTol) const;

  // (1 - alpha/r) K + (alpha/r) c, same shape family. Requires 0 <= alpha < r.
  ConvexDomain shrink(double alpha) const;

  // Uniform draw from the unit sphere of L0, expressed in ambient coordinates.
  Vec sample_unit_sphere(Rng& rng) const;
  // Uniform draw from the unit ball of L0.
  Vec sample_unit_ball(Rng& rng) const;
  // Draw a point of the domain (uniform for box/ball/simplex, mapped for
  // shrunken simplices). Used for solver restarts and randomized tests.
  Vec sample_point(Rng& rng) const;

  // max_{y in K} <a, y>, exact per shape.
  double support(const Vec& a) const;
  // A maximizer of <a, y> over K (deterministic tie-breaking).
  Vec support_point(const Vec& a) const;
  // max_{y in K} ||y - p||.
  double max_distance(const Vec& p) const;

  bool same_set(const ConvexDomain& other, double tol = 1e-12) const;

 private:
  ConvexDomain() = default;
  void finish_setup();
  Vec project_once(const Vec& x) const;

  Shape shape_ = Shape::kBox;
  int d_ = 0;
  int k_ = 0;
  Vec lo_, hi_;        // box
  Vec ball_center_;    // ball
  double ball_radius_ = 0.0;
  int simplex_dim_ = 0;
  double simplex_scale_ = 1.0;  // shrink factor about the barycenter
  Vec center_;
  double inradius_ = 0.0;
  double diameter_ = 0.0;
  std::vector<Vec> basis_;

  std::vector<Vec> simplex_vertices() const;
};

}  // namespace oco

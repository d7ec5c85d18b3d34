#pragma once

#include "geolab/model_space.hpp"

#include <optional>
#include <vector>

namespace geolab {

// How far a point set is from lying on a single geodesic: the largest
// (scaled) component of any point along the normal of the line through the
// two most separated points.  Zero means collinear.
Real collinearity_residual(const ModelSpace& space,
                           const std::vector<Vec>& points);

// Midpoint form of joint convexity of the distance: with m1 the midpoint
// of p1--q1 and m2 the midpoint of p2--q2,
//   d(m1, m2) <= (d(p1, p2) + d(q1, q2)) / 2,
// strictly unless the four points sit on one geodesic (when curved).
struct MidpointCheck {
  Real lhs = 0;     // d(m1, m2)
  Real rhs = 0;     // averaged endpoint distances
  Real margin = 0;  // rhs - lhs
  bool strict = false;
};

MidpointCheck midpoint_check(const ModelSpace& space, VecRef p1, VecRef q1,
                             VecRef p2, VecRef q2);

// Chord comparison: points at parameters t_ab, t_ac on the sides a--b, a--c
// of a geodesic triangle are no farther apart than their counterparts in
// the triangle with the same side lengths built in the flatter model of
// curvature chi_cmp (space.curvature() <= chi_cmp <= 0).
struct ComparisonCheck {
  Real chord = 0;             // d(q, r) in the given space
  Real comparison_chord = 0;  // d(q*, r*) in the comparison plane
  Real slack = 0;             // comparison_chord - chord
};

ComparisonCheck comparison_check(const ModelSpace& space, VecRef a, VecRef b,
                                 VecRef c, Real t_ab, Real t_ac, Real chi_cmp);

// Discrete convexity profile of t -> d(gamma1(t), gamma2(t)) (or of
// t -> d(p, gamma(t))) over a uniform grid: second differences classify
// the restriction as strictly convex, convex but flat somewhere (the
// collinear exceptional configuration), or a tolerance violation.
enum class ConvexityClass { strictly_convex, convex_constant_on_line, violation };

struct ConvexityReport {
  Real h = 0;
  Real tol = 0;
  long n_samples = 0;
  Real min_second_difference = 0;
  ConvexityClass classification = ConvexityClass::strictly_convex;
  bool collinear_configuration = false;
  std::vector<std::pair<Real, Real>> samples;  // (t, f(t))
};

ConvexityReport pair_profile(const ModelSpace& space,
                             const GeodesicSegment& gamma1,
                             const GeodesicSegment& gamma2, Real h = 1e-3,
                             Real tol = 1e-9);

ConvexityReport pointed_profile(const ModelSpace& space, VecRef p,
                                const GeodesicSegment& gamma, Real h = 1e-3,
                                Real tol = 1e-9);

// Closed half-spaces {x : <normal_i, x> >= 0} through the origin of R^n,
// one per row.
struct HalfspaceSystem {
  Mat normals;  // k x n, unit rows

  Index dimension() const { return normals.cols(); }
  Index count() const { return normals.rows(); }
};

HalfspaceSystem make_halfspace_system(MatRef normals);

// Do the half-spaces cover R^n?  An algebraic witness search settles most
// non-covering systems outright; otherwise uniform direction sampling looks
// for a point outside every half-space.  dim_intersection is the dimension
// of the intersection of all bounding hyperplanes.
struct CoverReport {
  bool covers = false;
  int dim_intersection = 0;
  long n_samples = 0;
  std::optional<Vec> uncovered_direction;
};

CoverReport halfspace_cover_check(const HalfspaceSystem& system,
                                  long n_samples = 1'000'000,
                                  std::uint64_t seed = 0x8f1db5a2c64d1e07ull);

}  // namespace geolab

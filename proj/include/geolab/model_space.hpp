#pragma once

#include "geolab/types.hpp"

#include <array>

namespace geolab {

enum class Geometry { euclidean, hyperbolic };

// A simply connected constant-curvature model space: flat R^n, or the
// hyperboloid sheet of curvature chi < 0 embedded in Minkowski R^{n,1}.
//
// Euclidean points are plain n-vectors.  Hyperbolic points are (n+1)-vectors
// x with <x,x>_M = 1/chi and x[0] > 0, where <.,.>_M is the Minkowski form
// diag(-1, 1, ..., 1).  Tangent vectors at p live in the ambient space and
// satisfy <p,v>_M = 0.
class ModelSpace {
public:
  static ModelSpace euclidean(int dim);
  static ModelSpace hyperbolic(int dim, Real curvature = -1.0);

  Geometry geometry() const { return geometry_; }
  int dim() const { return dim_; }
  Real curvature() const { return curvature_; }
  bool is_hyperbolic() const { return geometry_ == Geometry::hyperbolic; }

  // Length of the coordinate vectors this space operates on.
  Index ambient_dim() const { return is_hyperbolic() ? dim_ + 1 : dim_; }

  // Hyperboloid radius 1/sqrt(-chi); distances scale linearly with it.
  Real radius() const;

  // The sheet's base point (R, 0, ..., 0), or the origin when flat.
  Vec origin() const;

private:
  ModelSpace(Geometry g, int dim, Real curvature)
      : geometry_(g), dim_(dim), curvature_(curvature) {}

  Geometry geometry_;
  int dim_;
  Real curvature_;
};

// Minkowski form <x,y> = -x0 y0 + x1 y1 + ... on ambient vectors.
Real minkowski_dot(VecRef x, VecRef y);

// acosh(1 + u) for u >= 0, accurate near u = 0 where the naive form loses
// all precision; callers produce u by cancellation-free means.
Real acosh1p(Real u);

bool is_point(const ModelSpace& space, VecRef p, Real tol = 1e-8);
bool is_tangent(const ModelSpace& space, VecRef p, VecRef v, Real tol = 1e-8);

// Radial rescaling back onto the hyperboloid sheet (identity when flat).
// Rejects vectors that are not timelike with positive first coordinate.
Vec project_point(const ModelSpace& space, VecRef x);

// Component of v orthogonal to the sheet normal at p.
Vec project_tangent(const ModelSpace& space, VecRef p, VecRef v);

// Riemannian norm of a tangent vector at p.
Real norm_at(const ModelSpace& space, VecRef p, VecRef v);

Real distance(const ModelSpace& space, VecRef p, VecRef q);

// Point at parameter t in [0, 1] along the geodesic from p to q; endpoints
// are reproduced exactly.
Vec interpolate(const ModelSpace& space, VecRef p, VecRef q, Real t);

Vec exp_map(const ModelSpace& space, VecRef p, VecRef v);

// Inverse of exp_map: the tangent vector at p reaching q, with
// |log_map(p, q)| = distance(p, q).
Vec log_map(const ModelSpace& space, VecRef p, VecRef q);

// A directed minimizing geodesic, stored with enough data to evaluate it
// without recomputing the endpoint transport.
struct GeodesicSegment {
  Vec start;
  Vec end;
  Real length = 0;
  Vec initial_direction;  // unit tangent at start; zero vector if length == 0
};

GeodesicSegment segment_between(const ModelSpace& space, VecRef p, VecRef q);
Vec evaluate(const ModelSpace& space, const GeodesicSegment& seg, Real t);

// Orthonormal basis of the tangent space at p, one column per intrinsic
// dimension, built deterministically from the ambient axes.
Mat tangent_basis(const ModelSpace& space, VecRef p);

// Triangle in the curvature-chi model plane with prescribed side lengths,
// used for chord comparisons.  Vertex 0 sits at the model origin, vertex 1
// along the first axis, vertex 2 in the upper half plane.  Side lengths on
// the boundary of the triangle inequality are accepted and flagged.
struct ComparisonTriangle {
  Real chi = 0;                      // 0 = Euclidean plane, < 0 = hyperbolic
  std::array<Real, 3> sides{};       // sides[k] is opposite vertex k
  std::array<Vec, 3> vertices{};
  bool degenerate = false;
};

// Sides are given as d01, d02, d12 (distance between the indexed vertices).
// Throws std::invalid_argument if the triangle inequality fails by more
// than tol, or any side is negative.
ComparisonTriangle comparison_triangle(Real chi, Real d01, Real d02, Real d12,
                                       Real tol = 1e-9);

// Point at parameter t in [0, 1] along the side from vertex i to vertex j.
Vec comparison_point(const ComparisonTriangle& tri, int i, int j, Real t);

}  // namespace geolab

#include "geolab/model_space.hpp"

#include <algorithm>
#include <cmath>

namespace geolab {

namespace {

void check_size(const ModelSpace& space, VecRef x, const char* what) {
  if (x.size() != space.ambient_dim())
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(space.ambient_dim()) + ", got " +
                                std::to_string(x.size()));
}

void check_point(const ModelSpace& space, VecRef p, const char* what) {
  check_size(space, p, what);
  if (space.is_hyperbolic() && !is_point(space, p, 1e-6))
    throw std::invalid_argument(std::string(what) +
                                ": point is not on the hyperboloid sheet");
}

void check_unit_interval(Real t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("parameter t must lie in [0, 1]");
}

}  // namespace

ModelSpace ModelSpace::euclidean(int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return ModelSpace(Geometry::euclidean, dim, 0.0);
}

ModelSpace ModelSpace::hyperbolic(int dim, Real curvature) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  if (!(curvature < 0.0))
    throw std::invalid_argument("hyperbolic curvature must be negative");
  return ModelSpace(Geometry::hyperbolic, dim, curvature);
}

Real ModelSpace::radius() const {
  if (!is_hyperbolic())
    throw std::invalid_argument("radius is defined only for hyperbolic spaces");
  return 1.0 / std::sqrt(-curvature_);
}

Vec ModelSpace::origin() const {
  Vec p = Vec::Zero(ambient_dim());
  if (is_hyperbolic()) p[0] = radius();
  return p;
}

Real minkowski_dot(VecRef x, VecRef y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("minkowski_dot: mismatched or short vectors");
  return -x[0] * y[0] + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

Real acosh1p(Real u) {
  if (u <= 0.0) return 0.0;
  if (u < 1e-8) return std::sqrt(2.0 * u) * (1.0 - u / 12.0);
  return std::log1p(u + std::sqrt(u * (2.0 + u)));
}

bool is_point(const ModelSpace& space, VecRef p, Real tol) {
  if (p.size() != space.ambient_dim()) return false;
  if (!space.is_hyperbolic()) return p.allFinite();
  const Real r2 = space.radius() * space.radius();
  // The admissible residual grows with |p|^2: a far point stored in doubles
  // carries an unavoidable rounding residual of order eps * |p|^2.
  const Real scale = r2 + p.squaredNorm();
  return p[0] > 0.0 && std::abs(minkowski_dot(p, p) + r2) <= tol * scale;
}

bool is_tangent(const ModelSpace& space, VecRef p, VecRef v, Real tol) {
  if (v.size() != space.ambient_dim()) return false;
  if (!space.is_hyperbolic()) return v.allFinite();
  const Real scale =
      (space.radius() + p.norm()) * (space.radius() + v.norm());
  return std::abs(minkowski_dot(p, v)) <= tol * scale;
}

Vec project_point(const ModelSpace& space, VecRef x) {
  check_size(space, x, "project_point");
  if (!space.is_hyperbolic()) return x;
  const Real s = minkowski_dot(x, x);
  if (!(s < 0.0) || !(x[0] > 0.0))
    throw std::invalid_argument(
        "project_point: vector is not in the forward timelike cone");
  return x * (space.radius() / std::sqrt(-s));
}

Vec project_tangent(const ModelSpace& space, VecRef p, VecRef v) {
  check_size(space, v, "project_tangent");
  if (!space.is_hyperbolic()) return v;
  const Real r2 = space.radius() * space.radius();
  return v + (minkowski_dot(v, p) / r2) * p;
}

Real norm_at(const ModelSpace& space, VecRef p, VecRef v) {
  check_size(space, v, "norm_at");
  if (!space.is_hyperbolic()) return v.norm();
  (void)p;
  return std::sqrt(std::max<Real>(0.0, minkowski_dot(v, v)));
}

namespace {

// cosh(d/R) - 1 for two sheet points.  The difference form
// <p-q, p-q>_M / (2 R^2) is cancellation-free for nearby points but its
// absolute rounding error grows like eps * cosh(d)^2, while the direct form
// -<p,q>/R^2 - 1 cancels catastrophically near d = 0 yet is accurate to a
// few ulps once cosh(d/R) - 1 >= 1; switching between them keeps the
// recovered distance near machine precision at every scale.
Real cosh_gap(const ModelSpace& space, VecRef p, VecRef q) {
  const Real r2 = space.radius() * space.radius();
  const Vec delta = p - q;
  const Real u = minkowski_dot(delta, delta) / (2.0 * r2);
  if (u <= 1.0) return u;
  return -minkowski_dot(p, q) / r2 - 1.0;
}

}  // namespace

Real distance(const ModelSpace& space, VecRef p, VecRef q) {
  check_point(space, p, "distance");
  check_point(space, q, "distance");
  if (!space.is_hyperbolic()) return (p - q).norm();
  const Real r = space.radius();
  return r * acosh1p(cosh_gap(space, p, q));
}

Vec interpolate(const ModelSpace& space, VecRef p, VecRef q, Real t) {
  check_unit_interval(t);
  if (t == 0.0) return p;
  if (t == 1.0) return q;
  if (!space.is_hyperbolic()) {
    check_point(space, p, "interpolate");
    check_point(space, q, "interpolate");
    return (1.0 - t) * p + t * q;
  }
  const Real r = space.radius();
  const Real theta = distance(space, p, q) / r;
  if (theta < 1e-12) return project_point(space, (1.0 - t) * p + t * q);
  const Real s = std::sinh(theta);
  Vec x = (std::sinh((1.0 - t) * theta) / s) * p + (std::sinh(t * theta) / s) * q;
  return project_point(space, x);
}

Vec exp_map(const ModelSpace& space, VecRef p, VecRef v) {
  check_point(space, p, "exp_map");
  check_size(space, v, "exp_map");
  if (!space.is_hyperbolic()) return p + v;
  if (!is_tangent(space, p, v, 1e-6))
    throw std::invalid_argument("exp_map: vector is not tangent at p");
  const Real r = space.radius();
  const Real s = norm_at(space, p, v);
  if (s == 0.0) return p;
  const Real theta = s / r;
  // sinh(theta)/theta -> 1 smoothly, so one formula serves all step sizes.
  Vec x = std::cosh(theta) * p + (r * std::sinh(theta) / s) * v;
  return project_point(space, x);
}

Vec log_map(const ModelSpace& space, VecRef p, VecRef q) {
  check_point(space, p, "log_map");
  check_point(space, q, "log_map");
  if (!space.is_hyperbolic()) return q - p;
  const Real r = space.radius();
  const Real u = cosh_gap(space, p, q);
  if (u <= 0.0) return Vec::Zero(space.ambient_dim());
  const Real d = r * acosh1p(u);
  // q = cosh(theta) p + R sinh(theta) w with w the unit initial direction,
  // and cosh(theta) = 1 + u, sinh(theta) = sqrt(u (u + 2)).
  const Real sinh_theta = std::sqrt(u * (u + 2.0));
  Vec w = (q - (1.0 + u) * p) / (r * sinh_theta);
  return project_tangent(space, p, d * w);
}

GeodesicSegment segment_between(const ModelSpace& space, VecRef p, VecRef q) {
  GeodesicSegment seg;
  seg.start = p;
  seg.end = q;
  seg.length = distance(space, p, q);
  if (seg.length > 0.0)
    seg.initial_direction = log_map(space, p, q) / seg.length;
  else
    seg.initial_direction = Vec::Zero(space.ambient_dim());
  return seg;
}

Vec evaluate(const ModelSpace& space, const GeodesicSegment& seg, Real t) {
  check_unit_interval(t);
  return interpolate(space, seg.start, seg.end, t);
}

Mat tangent_basis(const ModelSpace& space, VecRef p) {
  const Index n = space.dim();
  if (!space.is_hyperbolic()) return Mat::Identity(n, n);
  check_point(space, p, "tangent_basis");
  const Index m = space.ambient_dim();
  Mat basis(m, n);
  Index have = 0;
  for (Index axis = 0; axis < m && have < n; ++axis) {
    Vec e = Vec::Zero(m);
    e[axis] = 1.0;
    Vec v = project_tangent(space, p, e);
    for (Index j = 0; j < have; ++j)
      v -= minkowski_dot(v, basis.col(j)) * basis.col(j);
    const Real s = norm_at(space, p, v);
    if (s > 1e-10) basis.col(have++) = v / s;
  }
  if (have < n)
    throw std::runtime_error("tangent_basis: degenerate axis projection");
  return basis;
}

ComparisonTriangle comparison_triangle(Real chi, Real d01, Real d02, Real d12,
                                       Real tol) {
  if (chi > 0.0)
    throw std::invalid_argument("comparison_triangle: curvature must be <= 0");
  if (d01 < 0.0 || d02 < 0.0 || d12 < 0.0)
    throw std::invalid_argument("comparison_triangle: negative side length");
  const Real slack = std::min({d01 + d02 - d12, d01 + d12 - d02,
                               d02 + d12 - d01});
  if (slack < -tol)
    throw std::invalid_argument(
        "comparison_triangle: side lengths violate the triangle inequality");

  ComparisonTriangle tri;
  tri.chi = chi;
  tri.sides = {d12, d02, d01};  // sides[k] is opposite vertex k
  tri.degenerate = slack <= tol || d01 <= tol || d02 <= tol || d12 <= tol;

  // Angle at vertex 0 via the flat or hyperbolic law of cosines.
  Real cos_a = 1.0;
  if (d01 > 0.0 && d02 > 0.0) {
    if (chi == 0.0) {
      cos_a = (d01 * d01 + d02 * d02 - d12 * d12) / (2.0 * d01 * d02);
    } else {
      const Real k = std::sqrt(-chi);
      const Real a = d01 * k, b = d02 * k, c = d12 * k;
      cos_a = (std::cosh(a) * std::cosh(b) - std::cosh(c)) /
              (std::sinh(a) * std::sinh(b));
    }
    cos_a = std::clamp<Real>(cos_a, -1.0, 1.0);
  }
  const Real sin_a = std::sqrt(std::max<Real>(0.0, 1.0 - cos_a * cos_a));

  if (chi == 0.0) {
    tri.vertices[0] = Vec2(0.0, 0.0);
    tri.vertices[1] = Vec2(d01, 0.0);
    tri.vertices[2] = Vec2(d02 * cos_a, d02 * sin_a);
  } else {
    const ModelSpace plane = ModelSpace::hyperbolic(2, chi);
    Vec e1 = Vec::Zero(3), e2 = Vec::Zero(3);
    e1[1] = 1.0;
    e2[2] = 1.0;
    tri.vertices[0] = plane.origin();
    tri.vertices[1] = exp_map(plane, tri.vertices[0], d01 * e1);
    tri.vertices[2] =
        exp_map(plane, tri.vertices[0], d02 * (cos_a * e1 + sin_a * e2));
  }
  return tri;
}

Vec comparison_point(const ComparisonTriangle& tri, int i, int j, Real t) {
  if (i < 0 || i > 2 || j < 0 || j > 2 || i == j)
    throw std::invalid_argument("comparison_point: vertex indices must be "
                                "distinct members of {0, 1, 2}");
  check_unit_interval(t);
  const ModelSpace plane = tri.chi == 0.0 ? ModelSpace::euclidean(2)
                                          : ModelSpace::hyperbolic(2, tri.chi);
  return interpolate(plane, tri.vertices[i], tri.vertices[j], t);
}

}  // namespace geolab

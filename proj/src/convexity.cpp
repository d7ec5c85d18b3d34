#include "geolab/convexity.hpp"

#include "geolab/random.hpp"

#include <algorithm>
#include <cmath>

namespace geolab {

Real collinearity_residual(const ModelSpace& space,
                           const std::vector<Vec>& points) {
  if (points.size() < 3) return 0.0;

  // Anchor the line on the two most separated points.
  std::size_t ia = 0, ib = 1;
  Real dmax = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const Real d = distance(space, points[i], points[j]);
      if (d > dmax) {
        dmax = d;
        ia = i;
        ib = j;
      }
    }
  if (dmax <= 1e-12) return 0.0;

  if (space.is_hyperbolic()) {
    if (space.ambient_dim() != 3)
      throw std::invalid_argument(
          "collinearity_residual: hyperbolic case is plane-only");
    // The geodesic through A and B is the sheet cut by span(A, B); its
    // Minkowski normal is J (A x B).
    Vec3 a = points[ia], b = points[ib];
    Vec3 w = a.cross(b);
    w[0] = -w[0];
    const Real ww = minkowski_dot(w, w);
    if (!(ww > 0.0)) return 0.0;
    w /= std::sqrt(ww);
    Real res = 0.0;
    for (const auto& x : points)
      res = std::max(res, std::abs(minkowski_dot(x, w)) / space.radius());
    return res;
  }

  const Vec dir = (points[ib] - points[ia]).normalized();
  Real res = 0.0;
  for (const auto& x : points) {
    const Vec rel = x - points[ia];
    res = std::max(res, (rel - rel.dot(dir) * dir).norm());
  }
  return res;
}

MidpointCheck midpoint_check(const ModelSpace& space, VecRef p1, VecRef q1,
                             VecRef p2, VecRef q2) {
  MidpointCheck out;
  const Vec m1 = interpolate(space, p1, q1, 0.5);
  const Vec m2 = interpolate(space, p2, q2, 0.5);
  out.lhs = distance(space, m1, m2);
  out.rhs = 0.5 * (distance(space, p1, p2) + distance(space, q1, q2));
  out.margin = out.rhs - out.lhs;
  out.strict = out.margin > 0.0;
  return out;
}

ComparisonCheck comparison_check(const ModelSpace& space, VecRef a, VecRef b,
                                 VecRef c, Real t_ab, Real t_ac, Real chi_cmp) {
  if (!(chi_cmp <= 0.0) || chi_cmp < space.curvature())
    throw std::invalid_argument(
        "comparison_check: need space curvature <= chi_cmp <= 0");
  ComparisonCheck out;
  const Vec q = interpolate(space, a, b, t_ab);
  const Vec r = interpolate(space, a, c, t_ac);
  out.chord = distance(space, q, r);

  const Real dab = distance(space, a, b);
  const Real dac = distance(space, a, c);
  const Real dbc = distance(space, b, c);
  const ComparisonTriangle tri = comparison_triangle(chi_cmp, dab, dac, dbc);
  const Vec qs = comparison_point(tri, 0, 1, t_ab);
  const Vec rs = comparison_point(tri, 0, 2, t_ac);
  const ModelSpace plane = chi_cmp == 0.0 ? ModelSpace::euclidean(2)
                                          : ModelSpace::hyperbolic(2, chi_cmp);
  out.comparison_chord = distance(plane, qs, rs);
  out.slack = out.comparison_chord - out.chord;
  return out;
}

namespace {

ConvexityReport profile_from_values(std::vector<std::pair<Real, Real>> samples,
                                    Real h, Real tol, bool collinear) {
  ConvexityReport report;
  report.h = h;
  report.tol = tol;
  report.n_samples = static_cast<long>(samples.size());
  report.collinear_configuration = collinear;

  Real min_d2 = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const Real d2 = samples[i - 1].second - 2.0 * samples[i].second +
                    samples[i + 1].second;
    min_d2 = std::min(min_d2, d2);
  }
  if (!std::isfinite(min_d2)) min_d2 = 0.0;
  report.min_second_difference = min_d2;
  if (min_d2 < -tol)
    report.classification = ConvexityClass::violation;
  else if (min_d2 > tol)
    report.classification = ConvexityClass::strictly_convex;
  else
    report.classification = ConvexityClass::convex_constant_on_line;
  report.samples = std::move(samples);
  return report;
}

void check_step(Real h) {
  if (!(h > 0.0) || h > 0.5)
    throw std::invalid_argument("convexity profile: h must lie in (0, 0.5]");
}

}  // namespace

ConvexityReport pair_profile(const ModelSpace& space,
                             const GeodesicSegment& gamma1,
                             const GeodesicSegment& gamma2, Real h, Real tol) {
  check_step(h);
  const long n = std::lround(1.0 / h);
  std::vector<std::pair<Real, Real>> samples;
  samples.reserve(n + 1);
  for (long i = 0; i <= n; ++i) {
    const Real t = std::min<Real>(1.0, static_cast<Real>(i) * h);
    samples.emplace_back(
        t, distance(space, evaluate(space, gamma1, t), evaluate(space, gamma2, t)));
  }
  const bool collinear =
      collinearity_residual(space, {gamma1.start, gamma1.end, gamma2.start,
                                    gamma2.end}) < 1e-8;
  return profile_from_values(std::move(samples), h, tol, collinear);
}

ConvexityReport pointed_profile(const ModelSpace& space, VecRef p,
                                const GeodesicSegment& gamma, Real h,
                                Real tol) {
  check_step(h);
  const long n = std::lround(1.0 / h);
  std::vector<std::pair<Real, Real>> samples;
  samples.reserve(n + 1);
  for (long i = 0; i <= n; ++i) {
    const Real t = std::min<Real>(1.0, static_cast<Real>(i) * h);
    samples.emplace_back(t, distance(space, p, evaluate(space, gamma, t)));
  }
  const bool collinear =
      collinearity_residual(space, {Vec(p), gamma.start, gamma.end}) < 1e-8;
  return profile_from_values(std::move(samples), h, tol, collinear);
}

HalfspaceSystem make_halfspace_system(MatRef normals) {
  if (normals.rows() < 1 || normals.cols() < 1)
    throw std::invalid_argument("make_halfspace_system: empty system");
  HalfspaceSystem sys;
  sys.normals = normals;
  for (Index i = 0; i < sys.normals.rows(); ++i) {
    const Real norm = sys.normals.row(i).norm();
    if (!(norm > 1e-12))
      throw std::invalid_argument("make_halfspace_system: zero normal row");
    sys.normals.row(i) /= norm;
  }
  return sys;
}

CoverReport halfspace_cover_check(const HalfspaceSystem& system, long n_samples,
                                  std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("halfspace_cover_check: n_samples must be >= 1");
  const Mat& a = system.normals;
  const Index n = a.cols();

  CoverReport report;
  report.n_samples = n_samples;

  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Real sigma_max = svd.singularValues()[0];
  int rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-10 * sigma_max) ++rank;
  report.dim_intersection = static_cast<int>(n) - rank;

  // Witness attempt: a least-squares solution of A x = -1 that strictly
  // satisfies A x < 0 is an uncovered direction, settling the question
  // without sampling.
  const Vec witness = svd.solve(Vec::Constant(a.rows(), -1.0));
  if (witness.norm() > 1e-12 && (a * witness).maxCoeff() < 0.0) {
    report.covers = false;
    report.uncovered_direction = witness / witness.norm();
    return report;
  }

  auto rng = seeded_engine(seed, 0xc07e12ull);
  for (long i = 0; i < n_samples; ++i) {
    const Vec dir = unit_sphere_sample(rng, n);
    if ((a * dir).maxCoeff() < 0.0) {
      report.covers = false;
      report.uncovered_direction = dir;
      return report;
    }
  }
  report.covers = true;
  return report;
}

}  // namespace geolab

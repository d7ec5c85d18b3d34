#include "doctest.h"

#include "geolab/convexity.hpp"
#include "geolab/random.hpp"

#include <cmath>

using namespace geolab;

namespace {

const ModelSpace h2 = ModelSpace::hyperbolic(2);

Vec on_axis(Real s) {
  const Mat basis = tangent_basis(h2, h2.origin());
  return exp_map(h2, h2.origin(), s * basis.col(0));
}

Vec sample_point(std::mt19937_64& rng, Real radius) {
  const Mat basis = tangent_basis(h2, h2.origin());
  std::uniform_real_distribution<Real> u(0.0, 1.0);
  return exp_map(h2, h2.origin(),
                 radius * std::sqrt(u(rng)) *
                     (basis * unit_sphere_sample(rng, 2)));
}

}  // namespace

TEST_CASE("collinearity residual vanishes exactly on geodesics") {
  std::vector<Vec> line = {on_axis(-1.0), on_axis(0.3), on_axis(1.7)};
  CHECK(collinearity_residual(h2, line) < 1e-12);

  // Push the middle point off the line; the residual tracks the push.
  const Mat basis = tangent_basis(h2, line[1]);
  std::vector<Vec> bent = line;
  bent[1] = exp_map(h2, line[1], 0.05 * basis.col(1));
  CHECK(collinearity_residual(h2, bent) > 1e-3);
  CHECK(collinearity_residual(h2, bent) < 0.2);

  const ModelSpace e2 = ModelSpace::euclidean(2);
  Vec a(2), b(2), c(2);
  a << 0.0, 0.0;
  b << 1.0, 1.0;
  c << 2.5, 2.5;
  CHECK(collinearity_residual(e2, {a, b, c}) < 1e-14);
  c << 2.5, 2.6;
  CHECK(collinearity_residual(e2, {a, b, c}) > 1e-3);

  // Fewer than three points are always collinear.
  CHECK(collinearity_residual(h2, {on_axis(0.4)}) == 0.0);
  CHECK(collinearity_residual(h2, {on_axis(0.4), on_axis(1.0)}) == 0.0);
}

TEST_CASE("midpoint inequality is strict off the exceptional line") {
  auto rng = seeded_engine(41, 0);
  int strict_count = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Vec p1 = sample_point(rng, 2.0);
    const Vec q1 = sample_point(rng, 2.0);
    const Vec p2 = sample_point(rng, 2.0);
    const Vec q2 = sample_point(rng, 2.0);
    if (collinearity_residual(h2, {p1, q1, p2, q2}) < 1e-4) continue;
    const MidpointCheck chk = midpoint_check(h2, p1, q1, p2, q2);
    CHECK(chk.margin > 0.0);
    CHECK(chk.strict);
    CHECK(chk.lhs == doctest::Approx(chk.rhs - chk.margin).epsilon(1e-12));
    ++strict_count;
  }
  CHECK(strict_count > 400);  // the collinearity filter rejects almost nothing
}

TEST_CASE("midpoint inequality degenerates to equality on one geodesic") {
  // Both segments on a common geodesic, same orientation: the midpoint
  // distance equals the averaged endpoint distance exactly.
  const MidpointCheck chk =
      midpoint_check(h2, on_axis(-1.2), on_axis(0.4), on_axis(0.1), on_axis(1.9));
  // Here `strict` reports only the sign of rounding noise, so the
  // meaningful statement is that the margin vanishes to machine precision.
  CHECK(std::abs(chk.margin) <= 1e-12);

  // In flat space equality also holds for parallel transports (a
  // parallelogram), with no geodesic degeneracy required.
  const ModelSpace e2 = ModelSpace::euclidean(2);
  Vec p1(2), q1(2), shift(2);
  p1 << 0.0, 0.0;
  q1 << 1.0, 0.25;
  shift << 0.4, 1.1;
  const MidpointCheck flat =
      midpoint_check(e2, p1, q1, (p1 + shift).eval(), (q1 + shift).eval());
  CHECK(flat.lhs == doctest::Approx(flat.rhs).epsilon(1e-13));
}

TEST_CASE("chords never exceed their flatter-model counterparts") {
  auto rng = seeded_engine(42, 0);
  std::uniform_real_distribution<Real> t(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec a = sample_point(rng, 2.0);
    const Vec b = sample_point(rng, 2.0);
    const Vec c = sample_point(rng, 2.0);
    const Real t_ab = t(rng), t_ac = t(rng);

    const ComparisonCheck flat = comparison_check(h2, a, b, c, t_ab, t_ac, 0.0);
    CHECK(flat.slack >= -1e-12);
    CHECK(flat.chord == doctest::Approx(flat.comparison_chord - flat.slack)
                            .epsilon(1e-12));

    // Comparing against the space's own curvature is an identity.
    const ComparisonCheck self =
        comparison_check(h2, a, b, c, t_ab, t_ac, -1.0);
    CHECK(std::abs(self.slack) < 1e-9);

    // Intermediate curvature sits between the two.
    const ComparisonCheck mid =
        comparison_check(h2, a, b, c, t_ab, t_ac, -0.5);
    CHECK(mid.slack >= -1e-12);
    CHECK(mid.comparison_chord <= flat.comparison_chord + 1e-12);
  }

  const Vec a = on_axis(0.0), b = on_axis(1.0), c = sample_point(rng, 1.0);
  CHECK_THROWS_AS(comparison_check(h2, a, b, c, 0.5, 0.5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(comparison_check(h2, a, b, c, 0.5, 0.5, -2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(comparison_check(h2, a, b, c, 1.5, 0.5, 0.0),
                  std::invalid_argument);
}

TEST_CASE("distance profiles between transverse segments are strictly convex") {
  auto rng = seeded_engine(43, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const GeodesicSegment g1 =
        segment_between(h2, sample_point(rng, 1.5), sample_point(rng, 1.5));
    const GeodesicSegment g2 =
        segment_between(h2, sample_point(rng, 1.5), sample_point(rng, 1.5));
    if (collinearity_residual(h2, {g1.start, g1.end, g2.start, g2.end}) < 1e-4)
      continue;
    const ConvexityReport rep = pair_profile(h2, g1, g2, 1e-2);
    CHECK(rep.classification == ConvexityClass::strictly_convex);
    CHECK(rep.min_second_difference > 0.0);
    CHECK_FALSE(rep.collinear_configuration);
    CHECK(rep.n_samples > 0);
    REQUIRE(!rep.samples.empty());
    CHECK(rep.samples.front().first == 0.0);
    CHECK(rep.samples.back().first == doctest::Approx(1.0));
  }
}

TEST_CASE("profiles on a shared geodesic are convex but flat") {
  // Two same-direction segments on one geodesic: f(t) = d(g1(t), g2(t)) is
  // constant, the exceptional configuration.
  const GeodesicSegment g1 = segment_between(h2, on_axis(-1.0), on_axis(0.0));
  const GeodesicSegment g2 = segment_between(h2, on_axis(0.5), on_axis(1.5));
  const ConvexityReport rep = pair_profile(h2, g1, g2, 1e-2);
  CHECK(rep.classification == ConvexityClass::convex_constant_on_line);
  CHECK(rep.collinear_configuration);
  CHECK(std::abs(rep.min_second_difference) <= rep.tol);
  for (const auto& [t, value] : rep.samples)
    CHECK(value == doctest::Approx(1.5).epsilon(1e-9));

  // A point watching a geodesic that runs straight through it.
  const GeodesicSegment through = segment_between(h2, on_axis(0.5), on_axis(2.0));
  const ConvexityReport pointed = pointed_profile(h2, on_axis(-0.5), through);
  CHECK(pointed.classification == ConvexityClass::convex_constant_on_line);
  CHECK(pointed.collinear_configuration);
  // f is affine here: distance grows linearly as the segment recedes.
  CHECK(pointed.samples.front().second == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pointed.samples.back().second == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("pointed profiles away from the line are strictly convex") {
  auto rng = seeded_engine(44, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const Vec p = sample_point(rng, 1.5);
    const GeodesicSegment g =
        segment_between(h2, sample_point(rng, 1.5), sample_point(rng, 1.5));
    if (collinearity_residual(h2, {p, g.start, g.end}) < 1e-4) continue;
    const ConvexityReport rep = pointed_profile(h2, p, g, 1e-2);
    CHECK(rep.classification == ConvexityClass::strictly_convex);
    CHECK(rep.min_second_difference > 0.0);
  }

  const GeodesicSegment g = segment_between(h2, on_axis(0.0), on_axis(1.0));
  CHECK_THROWS_AS(pointed_profile(h2, on_axis(-1.0), g, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(pointed_profile(h2, on_axis(-1.0), g, 0.6),
                  std::invalid_argument);
}

TEST_CASE("halfspace systems normalize and validate their rows") {
  Mat rows(2, 3);
  rows << 2.0, 0.0, 0.0, 0.0, 3.0, 0.0;
  const HalfspaceSystem sys = make_halfspace_system(rows);
  CHECK(sys.dimension() == 3);
  CHECK(sys.count() == 2);
  for (Index i = 0; i < 2; ++i)
    CHECK(sys.normals.row(i).norm() == doctest::Approx(1.0));

  Mat with_zero(2, 3);
  with_zero.setZero();
  with_zero(0, 0) = 1.0;
  CHECK_THROWS_AS(make_halfspace_system(with_zero), std::invalid_argument);
  CHECK_THROWS_AS(make_halfspace_system(Mat(0, 3)), std::invalid_argument);
}

TEST_CASE("cover verdicts match the geometry of small systems") {
  SUBCASE("a single half-space never covers") {
    Mat rows(1, 3);
    rows << 1.0, 0.0, 0.0;
    const CoverReport rep = halfspace_cover_check(make_halfspace_system(rows));
    CHECK_FALSE(rep.covers);
    CHECK(rep.dim_intersection == 2);
    REQUIRE(rep.uncovered_direction.has_value());
    const Vec& w = *rep.uncovered_direction;
    CHECK(rows.row(0).dot(w) < 0.0);
  }

  SUBCASE("opposite half-spaces cover, meeting in the shared hyperplane") {
    Mat rows(2, 4);
    rows.setZero();
    rows(0, 0) = 1.0;
    rows(1, 0) = -1.0;
    const CoverReport rep = halfspace_cover_check(make_halfspace_system(rows));
    CHECK(rep.covers);
    CHECK(rep.dim_intersection == 3);  // n - k + 1 with n = 4, k = 2
  }

  SUBCASE("three planar directions at 120 degrees cover the plane") {
    Mat rows(3, 2);
    for (int i = 0; i < 3; ++i) {
      const Real ang = 2.0 * M_PI * i / 3.0;
      rows(i, 0) = std::cos(ang);
      rows(i, 1) = std::sin(ang);
    }
    const CoverReport rep = halfspace_cover_check(make_halfspace_system(rows));
    CHECK(rep.covers);
    CHECK(rep.dim_intersection == 0);  // normals span the plane
  }

  SUBCASE("an open wedge is caught by the witness search") {
    Mat rows(2, 2);
    rows << 1.0, 0.0, 0.0, 1.0;  // first quadrant normals
    const CoverReport rep =
        halfspace_cover_check(make_halfspace_system(rows), 1000);
    CHECK_FALSE(rep.covers);
    REQUIRE(rep.uncovered_direction.has_value());
    const Vec& w = *rep.uncovered_direction;
    CHECK((rows * w).maxCoeff() < 0.0);  // outside every half-space
  }
}

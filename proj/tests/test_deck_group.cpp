#include "doctest.h"

#include "geolab/deck_group.hpp"
#include "geolab/random.hpp"

#include <algorithm>
#include <cmath>

using namespace geolab;

namespace {

// Regular genus-2 octagon constants: the base ball covering the fundamental
// domain has radius acosh(3 + 2 sqrt(2)); the shortest nontrivial
// displacement of its center is 2 acosh(1 + sqrt(2)).
const Real kOctagonCircumradius = std::acosh(3.0 + 2.0 * std::sqrt(2.0));
const Real kOctagonSystole = 2.0 * std::acosh(1.0 + std::sqrt(2.0));

Mat z2_basis() { return Mat::Identity(2, 2); }

}  // namespace

TEST_CASE("translations compose additively") {
  Vec t1(2), t2(2);
  t1 << 1.0, -0.5;
  t2 << 0.25, 2.0;
  const Isometry g1 = Isometry::make_translation(t1);
  const Isometry g2 = Isometry::make_translation(t2);

  Vec p(2);
  p << 0.1, 0.2;
  CHECK(((apply(g1, p) - (p + t1)).norm()) == 0.0);
  CHECK(((apply(compose(g1, g2), p) - (p + t1 + t2)).norm()) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(((apply(inverse(g1), p) - (p - t1)).norm()) == 0.0);
  CHECK(is_identity(compose(g1, inverse(g1))));

  const ModelSpace e2 = ModelSpace::euclidean(2);
  CHECK(displacement(e2, g1, p) == doctest::Approx(t1.norm()));
  CHECK(is_identity(Isometry::identity(e2)));
}

TEST_CASE("words concatenate with free reduction") {
  Isometry a = Isometry::make_translation(Vec::Zero(2));
  Isometry b = Isometry::make_translation(Vec::Zero(2));
  a.word = {1, 2};
  b.word = {-2, 3};
  CHECK(compose(a, b).word == std::vector<int>{1, 3});
  CHECK(inverse(a).word == std::vector<int>{-2, -1});

  Isometry c = a;
  c.word = {1, 2};
  Isometry cinv = inverse(c);
  CHECK(compose(c, cinv).word.empty());
}

TEST_CASE("form preservation and deck checks") {
  const ModelSpace h2 = ModelSpace::hyperbolic(2);
  CHECK(preserves_minkowski_form(Mat::Identity(3, 3)));
  CHECK_FALSE(preserves_minkowski_form(2.0 * Mat::Identity(3, 3)));

  // -I preserves the form but swaps the sheets, so it is not a deck map.
  CHECK(preserves_minkowski_form(-Mat::Identity(3, 3)));
  CHECK_FALSE(is_deck_isometry(h2, Isometry::make_linear(-Mat::Identity(3, 3))));
  CHECK(is_deck_isometry(h2, Isometry::identity(h2)));

  const QuotientSpace g2 = QuotientSpace::genus2_octagon();
  for (const Isometry& gen : g2.generators()) {
    CHECK(preserves_minkowski_form(gen.matrix));
    CHECK(is_deck_isometry(h2, gen));
    CHECK(displacement(h2, gen, h2.origin()) ==
          doctest::Approx(kOctagonSystole).epsilon(1e-10));
  }
}

TEST_CASE("mixed kinds cannot compose") {
  const ModelSpace h2 = ModelSpace::hyperbolic(2);
  const Isometry flat = Isometry::make_translation(Vec::Zero(2));
  const Isometry lin = Isometry::identity(h2);
  CHECK_THROWS_AS(compose(flat, lin), std::invalid_argument);
}

TEST_CASE("frames are orthonormal with prescribed legs") {
  const ModelSpace h2 = ModelSpace::hyperbolic(2);
  auto rng = seeded_engine(21, 0);
  const Mat basis0 = tangent_basis(h2, h2.origin());
  const Vec p = exp_map(h2, h2.origin(), 1.3 * basis0.col(0));
  const Mat bp = tangent_basis(h2, p);
  const Vec u = (bp * unit_sphere_sample(rng, 2)).eval();

  const Mat f = frame_at(h2, p, u);
  REQUIRE(f.cols() == 3);
  CHECK((f.col(0) - p / h2.radius()).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK((f.col(1) - u).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(minkowski_dot(f.col(0), f.col(0)) == doctest::Approx(-1.0));
  CHECK(minkowski_dot(f.col(1), f.col(2)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(minkowski_dot(f.col(2), f.col(2)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(frame_at(h2, p, Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("segment isometry carries one directed segment to another") {
  const ModelSpace h2 = ModelSpace::hyperbolic(2);
  auto rng = seeded_engine(22, 0);
  const Mat basis = tangent_basis(h2, h2.origin());

  for (int trial = 0; trial < 20; ++trial) {
    const Vec a =
        exp_map(h2, h2.origin(), (basis * gaussian_vec(rng, 2)).eval());
    const Mat ba = tangent_basis(h2, a);
    const Real len = 0.3 + trial * 0.1;
    const Vec b = exp_map(h2, a, len * (ba * unit_sphere_sample(rng, 2)));

    const Vec c =
        exp_map(h2, h2.origin(), (basis * gaussian_vec(rng, 2)).eval());
    const Mat bc = tangent_basis(h2, c);
    const Vec d = exp_map(h2, c, len * (bc * unit_sphere_sample(rng, 2)));

    const Isometry g = segment_isometry(h2, a, b, c, d);
    CHECK((apply(g, a) - c).norm() < 1e-9);
    CHECK((apply(g, b) - d).norm() < 1e-9);
    CHECK(preserves_minkowski_form(g.matrix, 1e-9));
  }

  // Mismatched lengths are rejected.
  const Vec a = h2.origin();
  const Vec b = exp_map(h2, a, 1.0 * basis.col(0));
  const Vec d = exp_map(h2, a, 2.0 * basis.col(1));
  CHECK_THROWS_AS(segment_isometry(h2, a, b, a, d), std::invalid_argument);
}

TEST_CASE("genus-2 octagon group satisfies the surface relation") {
  const QuotientSpace g2 = QuotientSpace::genus2_octagon();
  REQUIRE(g2.generators().size() == 4);
  CHECK(g2.model().is_hyperbolic());
  CHECK(g2.domain_circumradius() ==
        doctest::Approx(kOctagonCircumradius).epsilon(1e-12));
  CHECK(g2.min_displacement() ==
        doctest::Approx(kOctagonSystole).epsilon(1e-10));

  // a b a^-1 b^-1 c d c^-1 d^-1 = identity.
  const auto& g = g2.generators();
  Isometry r = Isometry::identity(g2.model());
  const int relator[] = {1, 2, -1, -2, 3, 4, -3, -4};
  for (const int letter : relator) {
    const Isometry& gen = g[static_cast<std::size_t>(std::abs(letter)) - 1];
    r = compose(r, letter > 0 ? gen : inverse(gen));
  }
  CHECK(is_identity(r, 1e-8));
  CHECK((r.matrix - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("lattice quotients validate their basis") {
  const QuotientSpace z2 = QuotientSpace::lattice(z2_basis());
  CHECK(z2.is_lattice());
  CHECK(z2.min_displacement() == doctest::Approx(1.0));
  CHECK(z2.domain_circumradius() ==
        doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(z2.basis_sigma_min() == doctest::Approx(1.0));
  CHECK((z2.basis() * z2.basis_inverse()).isIdentity(1e-14));

  Mat singular(2, 2);
  singular << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(QuotientSpace::lattice(singular), std::invalid_argument);
  CHECK_THROWS_AS(QuotientSpace::lattice(Mat::Ones(2, 3)),
                  std::invalid_argument);

  // Shortest lattice vector of the skewed basis (1,0), (0.35, 1.05).
  Mat generic(2, 2);
  generic << 1.0, 0.35, 0.0, 1.05;
  const QuotientSpace skew = QuotientSpace::lattice(generic);
  CHECK(skew.min_displacement() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lattice orbits are sorted and complete") {
  const auto orbit = lattice_orbit(z2_basis(), Vec::Zero(2), 1.5);
  REQUIRE(orbit.size() == 9);  // origin, 4 at distance 1, 4 at sqrt(2)
  CHECK(orbit[0].distance == 0.0);
  CHECK(orbit[0].point.isZero());
  for (int i = 1; i <= 4; ++i)
    CHECK(orbit[i].distance == doctest::Approx(1.0));
  for (int i = 5; i <= 8; ++i)
    CHECK(orbit[i].distance == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::is_sorted(orbit.begin(), orbit.end(),
                       [](const OrbitPoint& a, const OrbitPoint& b) {
                         return a.distance < b.distance;
                       }));

  // Off-center request measures distance from the center.
  Vec c(2);
  c << 0.5, 0.5;
  const auto near = lattice_orbit(z2_basis(), c, 0.8);
  REQUIRE(near.size() == 4);
  for (const auto& op : near)
    CHECK(op.distance == doctest::Approx(std::sqrt(2.0) / 2));

  CHECK_THROWS_AS(lattice_orbit(z2_basis(), Vec::Zero(2), -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(lattice_orbit(z2_basis(), Vec::Zero(2), 500.0, 10),
                  budget_error);
  try {
    lattice_orbit(z2_basis(), Vec::Zero(2), 500.0, 10);
  } catch (const budget_error& e) {
    CHECK(e.budget == "lattice orbit points");
    CHECK(e.limit == 10);
  }
}

TEST_CASE("fiber gaps read off the sorted distance profile") {
  const auto orbit = lattice_orbit(z2_basis(), Vec::Zero(2), 2.0);
  // Sorted distances: 0, 1 x4, sqrt(2) x4, 2 x4.
  REQUIRE(orbit.size() == 13);
  CHECK(fiber_gap(orbit, 1) == doctest::Approx(1.0));
  CHECK(fiber_gap(orbit, 5) == doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK(fiber_gap(orbit, 3) == 0.0);   // inside the distance-1 tie
  CHECK(fiber_gap(orbit, 13) == 0.0);  // whole list
  CHECK_THROWS_AS(fiber_gap(orbit, 0), std::invalid_argument);
  CHECK_THROWS_AS(fiber_gap(orbit, 14), std::invalid_argument);
}

TEST_CASE("fuchsian construction rejects unusable generators") {
  const ModelSpace h2 = ModelSpace::hyperbolic(2);
  CHECK_THROWS_AS(QuotientSpace::fuchsian(h2, {}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(
      QuotientSpace::fuchsian(h2, {Isometry::identity(h2)}, 0.0),
      std::invalid_argument);

  // Not an isometry of the form.
  Mat bad = Mat::Identity(3, 3);
  bad(1, 1) = 2.0;
  CHECK_THROWS_WITH_AS(
      QuotientSpace::fuchsian(h2, {Isometry::make_linear(bad)}, 1.0),
      "fuchsian: generator 0 does not preserve the Minkowski form",
      std::invalid_argument);

  // A rotation about the base point fixes it.
  Mat rot = Mat::Identity(3, 3);
  const Real c = std::cos(1.0), s = std::sin(1.0);
  rot(1, 1) = c;
  rot(1, 2) = -s;
  rot(2, 1) = s;
  rot(2, 2) = c;
  CHECK_THROWS_WITH_AS(
      QuotientSpace::fuchsian(h2, {Isometry::make_linear(rot)}, 1.0),
      "fuchsian: generator 0 fixes the base point", std::invalid_argument);

  CHECK_THROWS_AS(
      QuotientSpace::fuchsian(ModelSpace::euclidean(2),
                              {Isometry::make_translation(Vec::Ones(2))}, 1.0),
      std::invalid_argument);
}

TEST_CASE("hyperbolic orbit balls match the known ring structure") {
  const QuotientSpace g2 = QuotientSpace::genus2_octagon();
  const Vec c = g2.base_point();

  const auto small = orbit_ball(g2, c, 3.1);
  REQUIRE(small.size() == 9);  // identity plus eight side-pairing images
  CHECK(small[0].distance == 0.0);
  CHECK(small[0].element.word.empty());
  for (std::size_t i = 1; i < small.size(); ++i) {
    CHECK(small[i].distance ==
          doctest::Approx(kOctagonSystole).epsilon(1e-10));
    CHECK((apply(small[i].element, c) - small[i].point).norm() < 1e-8);
  }

  const auto ball = orbit_ball(g2, c, 6.2);
  CHECK(ball.size() == 105);
  CHECK(std::is_sorted(ball.begin(), ball.end(),
                       [](const OrbitPoint& a, const OrbitPoint& b) {
                         return a.distance < b.distance;
                       }));
  // Second shell of the orbit.
  CHECK(ball[9].distance == doctest::Approx(4.21842482023452).epsilon(1e-10));
  // No nontrivial element moves the center less than the global minimum.
  for (std::size_t i = 1; i < ball.size(); ++i)
    CHECK(ball[i].distance >= g2.min_displacement() - 1e-9);

  CHECK_THROWS_AS(orbit_ball(g2, c, -1.0), std::invalid_argument);
}

TEST_CASE("pruned enumeration agrees with the unpruned word ball") {
  const QuotientSpace g2 = QuotientSpace::genus2_octagon();
  const Vec c = g2.base_point();
  const Real radius = 6.2;

  const auto pruned = orbit_ball(g2, c, radius);
  const auto reference = word_ball_orbit(g2, c, radius, 6);
  REQUIRE(pruned.size() == reference.size());

  // Same point sets under a separation tolerance far below the systole.
  const Real sep_tol = 1e-6;
  for (const auto& op : reference) {
    bool found = false;
    for (const auto& pp : pruned) {
      if ((pp.point - op.point).norm() <= sep_tol) {
        found = true;
        break;
      }
    }
    CHECK(found);
  }

  CHECK_THROWS_AS(word_ball_orbit(g2, c, radius, -1), std::invalid_argument);
  const QuotientSpace z2 = QuotientSpace::lattice(z2_basis());
  CHECK_THROWS_AS(word_ball_orbit(z2, Vec::Zero(2), 1.0, 2),
                  std::invalid_argument);
}

TEST_CASE("orbit enumeration stops at its node budget") {
  QuotientSpace g2 = QuotientSpace::genus2_octagon();
  g2.set_max_enumeration_nodes(50);
  CHECK_THROWS_AS(orbit_ball(g2, g2.base_point(), 8.0), budget_error);
}

TEST_CASE("off-center hyperbolic orbits keep the point-stabilizer free") {
  const QuotientSpace g2 = QuotientSpace::genus2_octagon();
  const ModelSpace& h2 = g2.model();
  const Mat basis = tangent_basis(h2, h2.origin());
  const Vec off = exp_map(h2, h2.origin(), 0.7 * basis.col(0));

  const auto orbit = orbit_ball(g2, off, 4.0);
  REQUIRE(orbit.size() >= 2);
  CHECK(orbit[0].distance == 0.0);
  // Each listed element really maps the center to the listed point.
  for (const auto& op : orbit)
    CHECK((apply(op.element, off) - op.point).norm() < 1e-8);
  // Distinct orbit points are separated by at least the injectivity scale.
  for (std::size_t i = 0; i < orbit.size(); ++i)
    for (std::size_t j = i + 1; j < orbit.size(); ++j)
      CHECK(distance(h2, orbit[i].point, orbit[j].point) > 1e-3);
}

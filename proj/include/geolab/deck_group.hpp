#pragma once

#include "geolab/model_space.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace geolab {

// A cover isometry: a flat translation, or a linear map of Minkowski space
// preserving the form (M^T J M = J) and the forward sheet.  `word` records
// how the element was built from a generating set: entry +k means generator
// k-1, entry -k its inverse; the identity has an empty word.
struct Isometry {
  enum class Kind { translation, linear };

  Kind kind = Kind::translation;
  Vec translation;
  Mat matrix;
  std::vector<int> word;

  static Isometry make_translation(VecRef t);
  static Isometry make_linear(MatRef m);
  static Isometry identity(const ModelSpace& space);
};

Vec apply(const Isometry& g, VecRef p);
Mat apply_linear(const Isometry& g, MatRef columns);  // column-wise action

// Composition acts as (a * b)(p) = a(b(p)); words concatenate with free
// reduction of adjacent inverse letters.
Isometry compose(const Isometry& a, const Isometry& b);
Isometry inverse(const Isometry& g);

bool is_identity(const Isometry& g, Real tol = 1e-9);
bool preserves_minkowski_form(MatRef m, Real tol = 1e-8);

// Geometric sanity of a putative deck transformation for `space`.
bool is_deck_isometry(const ModelSpace& space, const Isometry& g,
                      Real tol = 1e-8);

// d(p, g p): how far g moves p.
Real displacement(const ModelSpace& space, const Isometry& g, VecRef p);

// Orientation-consistent orthonormal frame at p with first leg p/R and
// second leg the given unit tangent (hyperbolic plane only).
Mat frame_at(const ModelSpace& space, VecRef p, VecRef unit_tangent);

// The unique orientation-preserving isometry of the hyperbolic plane taking
// the directed segment (a, b) to (c, d); requires d(a,b) = d(c,d) up to tol.
Isometry segment_isometry(const ModelSpace& space, VecRef a, VecRef b,
                          VecRef c, VecRef d, Real tol = 1e-9);

// One orbit point g.center together with its distance from the enumeration
// center and the group element that produced it.
struct OrbitPoint {
  Vec point;
  Real distance = 0;
  Isometry element;
};

// A group element cached with its displacement at the quotient base point.
struct GroupElement {
  Isometry iso;
  Real base_displacement = 0;
};

// A model space together with a discrete free cocompact isometry group: a
// lattice of translations on flat R^n, or a surface group acting on the
// hyperbolic plane.  Quotient-metric queries enumerate group elements
// through a displacement-sorted cache that grows on demand.
class QuotientSpace {
public:
  // R^n modulo the integer span of the basis columns.
  static QuotientSpace lattice(MatRef basis);

  // Hyperbolic-plane quotient by the group generated by `gens`.
  static QuotientSpace fuchsian(ModelSpace model, std::vector<Isometry> gens,
                                Real domain_circumradius);

  // Surface group of the genus-2 regular octagon (vertex angle pi/4),
  // generators pairing opposite sides, satisfying a b a' b' c d c' d' = 1.
  static QuotientSpace genus2_octagon();

  const ModelSpace& model() const { return model_; }
  const std::vector<Isometry>& generators() const { return generators_; }
  const Vec& base_point() const { return base_; }
  bool is_lattice() const { return !model_.is_hyperbolic(); }
  const Mat& basis() const;
  const Mat& basis_inverse() const;
  Real basis_sigma_min() const;

  // Shortest displacement of the base point by a nontrivial group element;
  // half of it is the injectivity radius at the base projection.
  Real min_displacement() const { return min_displacement_; }

  // Radius of a ball around the base point covering a fundamental domain.
  Real domain_circumradius() const { return domain_circumradius_; }

  std::size_t max_enumeration_nodes() const { return max_nodes_; }
  void set_max_enumeration_nodes(std::size_t n) { max_nodes_ = n; }

  // Runs fn on the sorted list of all group elements whose base-point
  // displacement is at most `radius` (the list may extend further).  The
  // cache grows by radius doubling when the request exceeds its coverage;
  // access is safe from concurrent readers.
  void with_elements(Real radius,
                     const std::function<void(std::span<const GroupElement>,
                                              Real coverage)>& fn) const;

private:
  QuotientSpace(ModelSpace model) : model_(std::move(model)) {}

  void grow_cache(Real target_radius) const;

  ModelSpace model_;
  std::vector<Isometry> generators_;
  Vec base_;
  Mat basis_;  // lattice case only
  Mat basis_inverse_;
  Real sigma_min_ = 0;
  Real min_displacement_ = 0;
  Real domain_circumradius_ = 0;
  std::size_t max_nodes_ = 4'000'000;

  struct Cache;
  std::shared_ptr<Cache> cache_;
};

// All lattice points basis*k within `radius` of `center`, sorted by
// (distance, lexicographic coordinates).
std::vector<OrbitPoint> lattice_orbit(MatRef basis, VecRef center, Real radius,
                                      std::size_t max_points = 4'000'000);

// Orbit of `center` under the group, restricted to the ball of the given
// radius, sorted by (distance, lexicographic coordinates).  Fuchsian groups
// are enumerated by pruned breadth-first search over generator words; the
// pruning margin is the largest generator displacement at the center.
std::vector<OrbitPoint> orbit_ball(const QuotientSpace& space, VecRef center,
                                   Real radius);

// Unpruned reference enumeration: every group element whose generator word
// has length at most max_word_length, deduplicated, restricted to the ball.
std::vector<OrbitPoint> word_ball_orbit(const QuotientSpace& space,
                                        VecRef center, Real radius,
                                        int max_word_length);

// Gap d_{k+1} - d_k in a distance-sorted orbit: 0 when k is the whole list
// or the gap is within tie_tol, error when the list has fewer than k points.
Real fiber_gap(const std::vector<OrbitPoint>& orbit, std::size_t k,
               Real tie_tol = 1e-9);

namespace detail {
// Shared dedup grid: reports an existing point within sep_tol of the
// candidate, inserting the candidate otherwise.
class PointDedup {
public:
  PointDedup(Index dim, Real sep_tol);
  // Returns the index of a prior point within sep_tol, or -1 after insert.
  std::ptrdiff_t find_or_insert(VecRef p, std::size_t payload_index);

private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};
}  // namespace detail

}  // namespace geolab

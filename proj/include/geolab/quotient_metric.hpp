#pragma once

#include "geolab/deck_group.hpp"

#include <optional>
#include <utility>

namespace geolab {

// One candidate lift of the second argument of a quotient-distance query:
// the group element, the moved lift point, and d(p1, g p2).
struct LiftCandidate {
  Real dist = 0;
  Vec lift;
  Isometry element;
};

// Distance between the images of p1 and p2 downstairs: the minimum of
// d(p1, g p2) over the deck group, computed by scanning the displacement-
// sorted element cache with a triangle-inequality cutoff.
Real quotient_distance(const QuotientSpace& space, VecRef p1, VecRef p2);

// All lifts g p2 with d(p1, g p2) <= quotient_distance + window, sorted by
// distance then lexicographic lift coordinates.  window must be >= 0.
std::vector<LiftCandidate> lift_candidates(const QuotientSpace& space,
                                           VecRef p1, VecRef p2, Real window);

// Representative of the orbit of p closest to the base point, found by
// Babai rounding (lattices) plus greedy generator descent.
Vec reduce_to_domain(const QuotientSpace& space, VecRef p);

// The minimizing geodesics from p1's image to p2's image, one segment per
// distinct initial direction at p1.  `order` counts those directions;
// ties are resolved within min_tol = min_tol_rel * (1 + distance), and
// lifts in the band (min_tol, 10 min_tol] set the near-tie flag.
struct SegmentBundle {
  Vec p1;
  Vec p2;
  Real distance = 0;
  int order = 0;
  std::vector<GeodesicSegment> segments;  // one per direction class
  std::vector<Vec> lifts;                 // every minimizing lift of p2
  bool near_tie = false;
  Real min_tol_rel = 0;  // tolerances the bundle was resolved with
  Real dir_tol = 0;
};

SegmentBundle segment_bundle(const QuotientSpace& space, VecRef p1, VecRef p2,
                             Real min_tol_rel = 1e-7, Real dir_tol = 1e-6);

enum class ExtremumKind { pair_max, pointed_max };

// Outcome of a directional strictness probe around a candidate maximum:
// margin > 0 means the distance dropped in every sampled direction at the
// given radius.
struct ProbeCertificate {
  Real margin = 0;
  Real radius = 0;
  int n_directions = 0;
};

// A candidate local maximum of the quotient distance, on M x M or with the
// first point held fixed.
struct MaxPair {
  Vec p1;
  Vec p2;
  Real value = 0;
  ExtremumKind kind = ExtremumKind::pair_max;
  SegmentBundle bundle;
  bool converged = false;
  long iterations = 0;
  long evaluations = 0;
  Real final_step = 0;
  std::size_t seed_index = 0;
  std::optional<ProbeCertificate> certificate;
};

// Thrown when a search exhausts its iteration budget; carries the best
// iterate reached so far for diagnosis.
class search_error : public std::runtime_error {
public:
  search_error(std::string msg, MaxPair best)
      : std::runtime_error(std::move(msg)), best_iterate(std::move(best)) {}
  MaxPair best_iterate;
};

// Derivative-free ascent schedule: axis and random-direction moves of the
// current step, expansion along improving directions, step halving on
// failure, and a post-stagnation probe phase that either certifies the
// point or restarts the climb from an improving direction.
struct SearchSchedule {
  Real initial_step = 0;        // 0: use 0.1 * domain circumradius
  Real shrink = 0.5;
  Real stop_step = 1e-8;
  long max_iterations = 200'000;
  int n_probes = 16;            // random directions mixed into each sweep
  int certify_directions = 64;  // probe batch size after stagnation
  int max_certify_rounds = 25;
  std::uint64_t rng_seed = 0x9e3779b97f4a7c15ull;
};

// Multi-start maximization of the quotient distance over pairs; returns the
// best stagnation point across seeds (ties broken by seed order).
MaxPair find_max_pair(const QuotientSpace& space,
                      const std::vector<std::pair<Vec, Vec>>& seeds,
                      const SearchSchedule& schedule = {});

// Same climb with p1 frozen: maximizes q -> d(p1, q) over seeds for q.
MaxPair find_farthest_point(const QuotientSpace& space, VecRef p1,
                            const std::vector<Vec>& seeds,
                            const SearchSchedule& schedule = {});

// Evaluates the distance at `n_dirs` pseudo-random product-tangent
// directions at distance `radius` from the pair and reports the smallest
// observed decrease.  Rejects radii that are not safely below a quarter of
// the gap to the next lift shell, so a positive margin reflects the whole
// minimizing bundle rather than one lift.
ProbeCertificate strict_max_probe(const QuotientSpace& space,
                                  const MaxPair& pair, Real radius = 1e-3,
                                  int n_dirs = 64,
                                  std::uint64_t seed = 0x2545f4914f6cdd1dull);

}  // namespace geolab

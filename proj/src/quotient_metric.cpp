#include "geolab/quotient_metric.hpp"

#include "geolab/parallel.hpp"
#include "geolab/random.hpp"

#include <algorithm>
#include <cmath>

namespace geolab {

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (Index i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

void sort_candidates(std::vector<LiftCandidate>& cands) {
  std::sort(cands.begin(), cands.end(),
            [](const LiftCandidate& u, const LiftCandidate& v) {
              if (u.dist != v.dist) return u.dist < v.dist;
              return lex_less(u.lift, v.lift);
            });
}

struct ScanResult {
  Real best = 0;
  std::vector<LiftCandidate> cands;
};

// All lattice lifts p2 + B k with distance to p1 at most best + window.
// Babai rounding gives the upper bound that fixes the integer search box.
ScanResult scan_lattice(const QuotientSpace& space, VecRef p1, VecRef p2,
                        Real window, bool collect) {
  const Mat& basis = space.basis();
  const Index n = basis.rows();
  const Vec delta = p2 - p1;
  const Vec target = space.basis_inverse() * delta;  // minimize |B(k + target)|
  Vec k0(n);
  for (Index i = 0; i < n; ++i) k0[i] = std::round(-target[i]);
  const Real upper = (delta + basis * k0).norm();
  const Real reach = (upper + window) / space.basis_sigma_min();

  ScanResult out;
  out.best = upper;
  std::vector<std::int64_t> lo(n), hi(n), idx(n);
  for (Index i = 0; i < n; ++i) {
    lo[i] = static_cast<std::int64_t>(std::ceil(-target[i] - reach));
    hi[i] = static_cast<std::int64_t>(std::floor(-target[i] + reach));
    idx[i] = lo[i];
  }
  Vec k(n);
  while (true) {
    for (Index i = 0; i < n; ++i) k[i] = static_cast<Real>(idx[i]);
    const Vec shift = basis * k;
    const Real d = (delta + shift).norm();
    if (d < out.best) out.best = d;
    if (collect && d <= upper + window) {
      LiftCandidate c;
      c.dist = d;
      c.lift = p2 + shift;
      c.element = Isometry::make_translation(shift);
      out.cands.push_back(std::move(c));
    }
    Index i = 0;
    for (; i < n; ++i) {
      if (idx[i] < hi[i]) {
        ++idx[i];
        break;
      }
      idx[i] = lo[i];
    }
    if (i == n) break;
  }
  if (collect) {
    std::erase_if(out.cands, [&](const LiftCandidate& c) {
      return c.dist > out.best + window;
    });
    sort_candidates(out.cands);
  }
  return out;
}

// Greedy generator descent toward the base point with the folding element
// tracked: returns (h p, h).  Since the candidate set of a query is carried
// along by deck motions, scans may run on folded points and translate their
// results back through h afterwards.
std::pair<Vec, Isometry> fold_point(const QuotientSpace& space, VecRef p) {
  const ModelSpace& model = space.model();
  Isometry h = Isometry::identity(model);
  Vec cur = p;
  Real cur_dist = distance(model, space.base_point(), cur);
  if (cur_dist <= space.domain_circumradius()) return {std::move(cur), std::move(h)};

  std::vector<Isometry> steps;
  for (const auto& g : space.generators()) {
    steps.push_back(g);
    steps.push_back(inverse(g));
  }
  const std::size_t max_steps = 100'000;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_steps) throw budget_error("domain reduction steps", max_steps);
    Real best_dist = cur_dist;
    const Isometry* best_step = nullptr;
    Vec best_point;
    for (const auto& s : steps) {
      Vec moved = apply(s, cur);
      const Real d = distance(model, space.base_point(), moved);
      if (d < best_dist - 1e-14 * (1.0 + cur_dist)) {
        best_dist = d;
        best_step = &s;
        best_point = std::move(moved);
      }
    }
    if (best_step == nullptr) return {std::move(cur), std::move(h)};
    h = compose(*best_step, h);
    cur = std::move(best_point);
    cur_dist = best_dist;
  }
}

// Scan of the displacement-sorted element cache with the triangle cutoff:
// d(p1, g p2) >= displacement(g) - d(base, p1) - d(base, p2), so once the
// sorted displacement passes best + window + a + b nothing later matters.
// Both query points are folded toward the base point first, which bounds
// the cutoff by the fundamental domain size instead of by where the
// caller's representatives happen to sit; candidates are pulled back
// through the folding elements before they are returned.
ScanResult scan_group(const QuotientSpace& space, VecRef p1_in, VecRef p2_in,
                      Real window, bool collect) {
  const ModelSpace& model = space.model();
  auto [p1, h1] = fold_point(space, p1_in);
  auto [p2, h2] = fold_point(space, p2_in);
  const bool folded = !h1.word.empty() || !h2.word.empty();
  const Real a = distance(model, space.base_point(), p1);
  const Real b = distance(model, space.base_point(), p2);

  ScanResult out;
  bool done = false;
  Real request = 0.0;
  while (!done) {
    Real next_request = 0.0;
    space.with_elements(
        request, [&](std::span<const GroupElement> els, Real coverage) {
          out.best = std::numeric_limits<Real>::infinity();
          out.cands.clear();
          for (const auto& e : els) {
            if (e.base_displacement > out.best + window + a + b) {
              done = true;
              return;
            }
            Vec lift = apply(e.iso, p2);
            const Real d = distance(model, p1, lift);
            if (d < out.best) out.best = d;
            if (collect && d <= out.best + window) {
              LiftCandidate c;
              c.dist = d;
              c.lift = std::move(lift);
              c.element = e.iso;
              out.cands.push_back(std::move(c));
            }
          }
          const Real required =
              out.best + window + a + b + 1e-9 * (1.0 + out.best + a + b);
          if (coverage >= required)
            done = true;
          else
            next_request = required;
        });
    request = next_request;
  }
  if (collect) {
    std::erase_if(out.cands, [&](const LiftCandidate& c) {
      return c.dist > out.best + window;
    });
    if (folded) {
      // A candidate g found for (h1 p1, h2 p2) stands for h1^-1 g h2 at the
      // original points; distances are unchanged by construction.
      const Isometry h1_inv = inverse(h1);
      for (auto& c : out.cands) {
        c.lift = apply(h1_inv, c.lift);
        c.element = compose(h1_inv, compose(c.element, h2));
      }
    }
    sort_candidates(out.cands);
  }
  return out;
}

ScanResult scan_lifts(const QuotientSpace& space, VecRef p1, VecRef p2,
                      Real window, bool collect) {
  const Index m = space.model().ambient_dim();
  if (p1.size() != m || p2.size() != m)
    throw std::invalid_argument("quotient metric: point dimension mismatch");
  if (!(window >= 0.0))
    throw std::invalid_argument("quotient metric: window must be >= 0");
  return space.is_lattice() ? scan_lattice(space, p1, p2, window, collect)
                            : scan_group(space, p1, p2, window, collect);
}

}  // namespace

Real quotient_distance(const QuotientSpace& space, VecRef p1, VecRef p2) {
  return scan_lifts(space, p1, p2, 0.0, false).best;
}

std::vector<LiftCandidate> lift_candidates(const QuotientSpace& space,
                                           VecRef p1, VecRef p2, Real window) {
  return scan_lifts(space, p1, p2, window, true).cands;
}

Vec reduce_to_domain(const QuotientSpace& space, VecRef p) {
  const ModelSpace& model = space.model();
  if (p.size() != model.ambient_dim())
    throw std::invalid_argument("reduce_to_domain: point dimension mismatch");
  if (space.is_lattice()) {
    const Vec coeffs = space.basis_inverse() * p;
    Vec k(coeffs.size());
    for (Index i = 0; i < k.size(); ++i) k[i] = std::round(coeffs[i]);
    return p - space.basis() * k;
  }
  return fold_point(space, p).first;
}

SegmentBundle segment_bundle(const QuotientSpace& space, VecRef p1, VecRef p2,
                             Real min_tol_rel, Real dir_tol) {
  if (!(min_tol_rel > 0.0) || !(dir_tol > 0.0))
    throw std::invalid_argument("segment_bundle: tolerances must be positive");
  const ModelSpace& model = space.model();

  SegmentBundle bundle;
  bundle.p1 = p1;
  bundle.p2 = p2;
  bundle.min_tol_rel = min_tol_rel;
  bundle.dir_tol = dir_tol;
  bundle.distance = quotient_distance(space, p1, p2);
  const Real min_tol = min_tol_rel * (1.0 + bundle.distance);

  if (bundle.distance <= min_tol) {
    // Coincident images: the single degenerate segment.
    bundle.order = 1;
    bundle.segments.push_back(segment_between(model, p1, p1));
    bundle.lifts.push_back(p1);
    return bundle;
  }

  const auto cands = lift_candidates(space, p1, p2, 10.0 * min_tol);
  std::vector<Vec> reps;  // direction class representatives
  for (const auto& c : cands) {
    if (c.dist > bundle.distance + min_tol) {
      bundle.near_tie = true;
      continue;
    }
    bundle.lifts.push_back(c.lift);
    Vec dir = log_map(model, p1, c.lift) / c.dist;
    bool fresh = true;
    for (const auto& rep : reps) {
      if (norm_at(model, p1, dir - rep) <= dir_tol) {
        fresh = false;
        break;
      }
    }
    if (fresh) {
      reps.push_back(dir);
      bundle.segments.push_back(segment_between(model, p1, c.lift));
    }
  }
  bundle.order = static_cast<int>(reps.size());
  return bundle;
}

// ---------------------------------------------------------------------------
// climbing machinery

namespace {

struct Climber {
  const QuotientSpace& space;
  const SearchSchedule& sched;
  bool frozen_first;
  std::uint64_t rng_base;

  Vec x, y;
  Real f = 0;
  long iterations = 0;
  long evaluations = 0;

  Real eval(VecRef a, VecRef b) {
    ++evaluations;
    return quotient_distance(space, a, b);
  }

  // A direction is a coefficient vector over [basis at x | basis at y]
  // (only the y block when the first point is frozen).
  Index dir_dim() const {
    return (frozen_first ? 1 : 2) * space.model().dim();
  }

  std::pair<Vec, Vec> moved(VecRef coeffs, Real step) const {
    const ModelSpace& model = space.model();
    const Index n = model.dim();
    Vec nx = x, ny;
    if (!frozen_first) {
      const Mat bx = tangent_basis(model, x);
      nx = exp_map(model, x, step * (bx * coeffs.head(n)));
      // Folding proposals back into the fundamental domain leaves the
      // quotient distance unchanged and keeps every evaluation within the
      // radius the element cache is sized for.
      nx = reduce_to_domain(space, nx);
    }
    const Mat by = tangent_basis(model, y);
    ny = exp_map(model, y, step * (by * coeffs.tail(n)));
    ny = reduce_to_domain(space, ny);
    return {std::move(nx), std::move(ny)};
  }

  // One sweep: axis moves plus pseudo-random probes at the current step.
  // Returns the best improving coefficient direction, if any.
  std::optional<Vec> best_direction(Real step) {
    const Index dd = dir_dim();
    std::optional<Vec> best;
    Real f_best = f;
    auto consider = [&](const Vec& coeffs) {
      auto [nx, ny] = moved(coeffs, step);
      const Real fc = eval(nx, ny);
      if (fc > f_best + 1e-15 * (1.0 + std::abs(f))) {
        f_best = fc;
        best = coeffs;
      }
    };
    for (Index i = 0; i < dd; ++i) {
      Vec e = Vec::Zero(dd);
      e[i] = 1.0;
      consider(e);
      e[i] = -1.0;
      consider(e);
    }
    auto rng = seeded_engine(rng_base, 0x51ab5000u + static_cast<std::uint64_t>(
                                                         iterations));
    for (int i = 0; i < sched.n_probes; ++i)
      consider(unit_sphere_sample(rng, dd));
    return best;
  }

  void accept(const Vec& coeffs, Real step) {
    auto [nx, ny] = moved(coeffs, step);
    // Expand along the improving direction while it keeps paying off.
    Real fc = eval(nx, ny);
    Real grow = step;
    // Beyond a few domain diameters an expanded move only wraps around the
    // quotient, so the expansion is capped.
    const Real max_step = 16.0 * space.domain_circumradius();
    while (grow <= max_step) {
      grow *= 2.0;
      auto [gx, gy] = moved(coeffs, grow);
      const Real fg = eval(gx, gy);
      if (fg <= fc) break;
      nx = std::move(gx);
      ny = std::move(gy);
      fc = fg;
    }
    x = reduce_to_domain(space, nx);
    y = reduce_to_domain(space, ny);
    f = eval(x, y);
  }

  // Post-stagnation batch: look for any ascent at coarse radii; a clean
  // batch certifies the stagnation point, an improving direction restarts
  // the climb.
  std::optional<std::pair<Vec, Real>> escape_probe(int round) {
    const Real radii[] = {1e-3, 1e-5};
    std::optional<std::pair<Vec, Real>> best;
    Real f_best = f;
    auto rng = seeded_engine(rng_base, 0xe5cafe00u + static_cast<std::uint64_t>(round));
    for (Real radius : radii) {
      const Real r = std::max(radius, 10.0 * sched.stop_step);
      for (int i = 0; i < sched.certify_directions; ++i) {
        Vec coeffs = unit_sphere_sample(rng, dir_dim());
        auto [nx, ny] = moved(coeffs, r);
        const Real fc = eval(nx, ny);
        if (fc > f_best + 1e-15 * (1.0 + std::abs(f))) {
          f_best = fc;
          best = std::make_pair(std::move(coeffs), r);
        }
      }
    }
    return best;
  }

  MaxPair snapshot(bool converged, Real final_step,
                   std::size_t seed_index) const {
    MaxPair out;
    out.p1 = x;
    out.p2 = y;
    out.value = f;
    out.kind = frozen_first ? ExtremumKind::pointed_max : ExtremumKind::pair_max;
    out.bundle = segment_bundle(space, x, y);
    out.converged = converged;
    out.iterations = iterations;
    out.evaluations = evaluations;
    out.final_step = final_step;
    out.seed_index = seed_index;
    return out;
  }

  MaxPair run(std::size_t seed_index) {
    x = reduce_to_domain(space, x);
    y = reduce_to_domain(space, y);
    f = eval(x, y);
    Real step = sched.initial_step > 0.0
                    ? sched.initial_step
                    : 0.1 * space.domain_circumradius();
    int certify_rounds = 0;
    while (true) {
      if (++iterations > sched.max_iterations)
        throw search_error("search iteration budget exhausted",
                           snapshot(false, step, seed_index));
      const auto dir = best_direction(step);
      if (dir) {
        accept(*dir, step);
        continue;
      }
      step *= sched.shrink;
      if (step >= sched.stop_step) continue;
      // Stagnated below the stop step: certify or keep climbing.
      const auto escape = escape_probe(certify_rounds);
      if (!escape) return snapshot(true, step, seed_index);
      if (++certify_rounds > sched.max_certify_rounds)
        return snapshot(false, step, seed_index);
      accept(escape->first, escape->second);
      step = std::max(escape->second, 1e2 * sched.stop_step);
    }
  }
};

MaxPair multi_start(const QuotientSpace& space,
                    const std::vector<std::pair<Vec, Vec>>& seeds,
                    bool frozen_first, const SearchSchedule& sched) {
  if (seeds.empty())
    throw std::invalid_argument("search: at least one seed required");
  std::vector<std::optional<MaxPair>> results(seeds.size());
  std::vector<std::optional<MaxPair>> failures(seeds.size());

  parallel_for(seeds.size(), [&](std::size_t i) {
    Climber climber{space, sched, frozen_first,
                    mix_seed(sched.rng_seed, 0x5eed0000ull + i)};
    climber.x = seeds[i].first;
    climber.y = seeds[i].second;
    try {
      results[i] = climber.run(i);
    } catch (const search_error& err) {
      failures[i] = err.best_iterate;
    }
  });

  std::optional<MaxPair> best;
  for (const auto& r : results)
    if (r && r->converged && (!best || r->value > best->value)) best = *r;
  if (best) return *best;

  std::optional<MaxPair> best_partial;
  for (const auto& r : results)
    if (r && (!best_partial || r->value > best_partial->value))
      best_partial = *r;
  for (const auto& r : failures)
    if (r && (!best_partial || r->value > best_partial->value))
      best_partial = *r;
  throw search_error("no search seed reached a certified stagnation point",
                     best_partial ? *best_partial : MaxPair{});
}

}  // namespace

MaxPair find_max_pair(const QuotientSpace& space,
                      const std::vector<std::pair<Vec, Vec>>& seeds,
                      const SearchSchedule& schedule) {
  return multi_start(space, seeds, false, schedule);
}

MaxPair find_farthest_point(const QuotientSpace& space, VecRef p1,
                            const std::vector<Vec>& seeds,
                            const SearchSchedule& schedule) {
  std::vector<std::pair<Vec, Vec>> pairs;
  pairs.reserve(seeds.size());
  for (const auto& s : seeds) pairs.emplace_back(Vec(p1), s);
  return multi_start(space, pairs, true, schedule);
}

ProbeCertificate strict_max_probe(const QuotientSpace& space,
                                  const MaxPair& pair, Real radius, int n_dirs,
                                  std::uint64_t seed) {
  if (!(radius > 0.0) || n_dirs < 1)
    throw std::invalid_argument("strict_max_probe: bad radius or direction count");
  const ModelSpace& model = space.model();
  const Real value = quotient_distance(space, pair.p1, pair.p2);
  const Real min_tol = 1e-7 * (1.0 + value);

  // The probe only reads the minimizing bundle correctly if every probe
  // point keeps the same competing lift set; require the next lift shell to
  // sit more than 4 * radius above the minimum.
  const auto cands =
      lift_candidates(space, pair.p1, pair.p2, std::max(4.5 * radius, 20.0 * min_tol));
  for (const auto& c : cands) {
    if (c.dist <= value + min_tol) continue;
    if (c.dist - value <= 4.0 * radius)
      throw std::invalid_argument(
          "strict_max_probe: radius exceeds a quarter of the lift gap");
    break;
  }

  const bool frozen = pair.kind == ExtremumKind::pointed_max;
  const Index n = model.dim();
  const Index dd = (frozen ? 1 : 2) * n;
  auto rng = seeded_engine(seed, 0x9a0be11eull);

  ProbeCertificate cert;
  cert.radius = radius;
  cert.n_directions = n_dirs;
  cert.margin = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < n_dirs; ++i) {
    const Vec coeffs = unit_sphere_sample(rng, dd);
    Vec nx = pair.p1;
    if (!frozen) {
      const Mat bx = tangent_basis(model, pair.p1);
      nx = exp_map(model, pair.p1, radius * (bx * coeffs.head(n)));
    }
    const Mat by = tangent_basis(model, pair.p2);
    const Vec ny = exp_map(model, pair.p2, radius * (by * coeffs.tail(n)));
    const Real fp = quotient_distance(space, nx, ny);
    cert.margin = std::min(cert.margin, value - fp);
  }
  return cert;
}

}  // namespace geolab

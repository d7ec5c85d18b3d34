#include "geolab/deck_group.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <numbers>
#include <unordered_map>

namespace geolab {

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (Index i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

void sort_orbit(std::vector<OrbitPoint>& orbit) {
  std::sort(orbit.begin(), orbit.end(),
            [](const OrbitPoint& x, const OrbitPoint& y) {
              if (x.distance != y.distance) return x.distance < y.distance;
              return lex_less(x.point, y.point);
            });
}

std::vector<int> reduce_word(std::vector<int> w) {
  std::vector<int> out;
  for (int letter : w) {
    if (!out.empty() && out.back() == -letter)
      out.pop_back();
    else
      out.push_back(letter);
  }
  return out;
}

// Rescale a near-hyperboloid point back onto the sheet when that is
// numerically meaningful.  Extremely far points (coordinates near
// 1/sqrt(eps)) can round to a non-timelike vector; they are left untouched
// because no rescaling could restore information already lost.
Vec reproject(const ModelSpace& model, Vec p) {
  const Real s = minkowski_dot(p, p);
  if (s < 0.0) p *= model.radius() / std::sqrt(-s);
  return p;
}

// Gram-Schmidt on the columns with respect to the (-,+,...,+) form, so the
// matrix preserves it to machine precision.  Long products amplify any form
// residual of a factor quadratically in the matrix norm, so generators are
// polished once at construction.
Mat minkowski_polish(Mat m) {
  const Index n = m.rows();
  for (Index j = 0; j < n; ++j) {
    Vec c = m.col(j);
    for (Index k = 0; k < j; ++k) {
      const Real sign_k = (k == 0) ? -1.0 : 1.0;
      c -= sign_k * minkowski_dot(c, m.col(k)) * m.col(k);
    }
    const Real sign_j = (j == 0) ? -1.0 : 1.0;
    const Real q = sign_j * minkowski_dot(c, c);
    if (!(q > 0.0))
      throw std::invalid_argument(
          "isometry matrix cannot be polished to the Minkowski form");
    m.col(j) = c / std::sqrt(q);
  }
  return m;
}

}  // namespace

Isometry Isometry::make_translation(VecRef t) {
  Isometry g;
  g.kind = Kind::translation;
  g.translation = t;
  return g;
}

Isometry Isometry::make_linear(MatRef m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("linear isometry matrix must be square");
  Isometry g;
  g.kind = Kind::linear;
  g.matrix = m;
  return g;
}

Isometry Isometry::identity(const ModelSpace& space) {
  if (space.is_hyperbolic())
    return make_linear(Mat::Identity(space.ambient_dim(), space.ambient_dim()));
  return make_translation(Vec::Zero(space.ambient_dim()));
}

Vec apply(const Isometry& g, VecRef p) {
  if (g.kind == Isometry::Kind::translation) {
    if (g.translation.size() != p.size())
      throw std::invalid_argument("apply: dimension mismatch");
    return p + g.translation;
  }
  if (g.matrix.cols() != p.size())
    throw std::invalid_argument("apply: dimension mismatch");
  return g.matrix * p;
}

Mat apply_linear(const Isometry& g, MatRef columns) {
  if (g.kind == Isometry::Kind::translation)
    return columns.colwise() + g.translation;
  return g.matrix * columns;
}

Isometry compose(const Isometry& a, const Isometry& b) {
  if (a.kind != b.kind)
    throw std::invalid_argument("compose: mixed isometry kinds");
  Isometry g;
  g.kind = a.kind;
  if (a.kind == Isometry::Kind::translation)
    g.translation = a.translation + b.translation;
  else
    g.matrix = a.matrix * b.matrix;
  std::vector<int> w = a.word;
  w.insert(w.end(), b.word.begin(), b.word.end());
  g.word = reduce_word(std::move(w));
  return g;
}

Isometry inverse(const Isometry& g) {
  Isometry out;
  out.kind = g.kind;
  if (g.kind == Isometry::Kind::translation) {
    out.translation = -g.translation;
  } else {
    // For form-preserving M the inverse is J M^T J; cheaper and more stable
    // than generic inversion.
    const Index m = g.matrix.rows();
    Vec jdiag = Vec::Ones(m);
    jdiag[0] = -1.0;
    out.matrix = jdiag.asDiagonal() * g.matrix.transpose() * jdiag.asDiagonal();
  }
  out.word.reserve(g.word.size());
  for (auto it = g.word.rbegin(); it != g.word.rend(); ++it)
    out.word.push_back(-*it);
  return out;
}

bool is_identity(const Isometry& g, Real tol) {
  if (g.kind == Isometry::Kind::translation)
    return g.translation.lpNorm<Eigen::Infinity>() <= tol;
  const Index m = g.matrix.rows();
  return (g.matrix - Mat::Identity(m, m)).lpNorm<Eigen::Infinity>() <= tol;
}

bool preserves_minkowski_form(MatRef m, Real tol) {
  if (m.rows() != m.cols() || m.rows() < 2) return false;
  Vec jdiag = Vec::Ones(m.rows());
  jdiag[0] = -1.0;
  const Mat residual =
      m.transpose() * jdiag.asDiagonal() * m - Mat(jdiag.asDiagonal());
  return residual.lpNorm<Eigen::Infinity>() <= tol;
}

bool is_deck_isometry(const ModelSpace& space, const Isometry& g, Real tol) {
  if (space.is_hyperbolic()) {
    if (g.kind != Isometry::Kind::linear) return false;
    if (g.matrix.rows() != space.ambient_dim()) return false;
    if (!preserves_minkowski_form(g.matrix, tol)) return false;
    return g.matrix(0, 0) > 0.0;  // preserves the forward sheet
  }
  return g.kind == Isometry::Kind::translation &&
         g.translation.size() == space.ambient_dim() &&
         g.translation.allFinite();
}

Real displacement(const ModelSpace& space, const Isometry& g, VecRef p) {
  return distance(space, p, apply(g, p));
}

Mat frame_at(const ModelSpace& space, VecRef p, VecRef unit_tangent) {
  if (!space.is_hyperbolic() || space.ambient_dim() != 3)
    throw std::invalid_argument("frame_at: hyperbolic plane only");
  Vec3 pp = p, u = unit_tangent;
  Vec3 n = pp.cross(u);
  n[0] = -n[0];  // J * (p x u) is Minkowski-orthogonal to both
  const Real nn = minkowski_dot(n, n);
  if (!(nn > 0.0))
    throw std::invalid_argument("frame_at: degenerate tangent direction");
  n /= std::sqrt(nn);
  Mat f(3, 3);
  f.col(0) = pp / space.radius();
  f.col(1) = u;
  f.col(2) = n;
  return f;
}

Isometry segment_isometry(const ModelSpace& space, VecRef a, VecRef b, VecRef c,
                          VecRef d, Real tol) {
  const Real dab = distance(space, a, b);
  const Real dcd = distance(space, c, d);
  if (std::abs(dab - dcd) > tol * (1.0 + dab))
    throw std::invalid_argument(
        "segment_isometry: the segments have different lengths");
  if (dab == 0.0)
    throw std::invalid_argument("segment_isometry: degenerate segment");
  const Vec ua = log_map(space, a, b) / dab;
  const Vec uc = log_map(space, c, d) / dcd;
  const Mat fa = frame_at(space, a, ua);
  const Mat fc = frame_at(space, c, uc);
  Vec jdiag = Vec::Ones(3);
  jdiag[0] = -1.0;
  // F_c * F_a^{-1} with F_a^{-1} = J F_a^T J for a Minkowski-orthogonal frame.
  Mat m = fc * jdiag.asDiagonal() * fa.transpose() * jdiag.asDiagonal();
  return Isometry::make_linear(m);
}

// ---------------------------------------------------------------------------
// dedup grid

namespace detail {

struct PointDedup::Impl {
  Index dim;
  Real sep;
  struct Entry {
    Vec point;
    std::size_t payload;
  };
  std::unordered_map<std::uint64_t, std::vector<Entry>> cells;

  std::uint64_t cell_hash(const std::vector<std::int64_t>& cell) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto c : cell) {
      h ^= static_cast<std::uint64_t>(c);
      h *= 1099511628211ull;
    }
    return h;
  }

  std::vector<std::int64_t> cell_of(VecRef p, const std::vector<int>& shift) {
    std::vector<std::int64_t> cell(dim);
    for (Index i = 0; i < dim; ++i)
      cell[i] = static_cast<std::int64_t>(std::floor(p[i] / sep)) +
                (shift.empty() ? 0 : shift[i]);
    return cell;
  }
};

PointDedup::PointDedup(Index dim, Real sep_tol)
    : impl_(std::make_shared<Impl>()) {
  impl_->dim = dim;
  impl_->sep = sep_tol;
}

std::ptrdiff_t PointDedup::find_or_insert(VecRef p, std::size_t payload) {
  auto& im = *impl_;
  std::vector<int> shift(im.dim, -1);
  // Scan the 3^dim neighborhood of p's cell; any point within sep_tol in
  // every coordinate lands in one of these cells.
  while (true) {
    auto key = im.cell_hash(im.cell_of(p, shift));
    auto it = im.cells.find(key);
    if (it != im.cells.end()) {
      for (const auto& e : it->second)
        if ((e.point - p).lpNorm<Eigen::Infinity>() <= im.sep)
          return static_cast<std::ptrdiff_t>(e.payload);
    }
    Index i = 0;
    for (; i < im.dim; ++i) {
      if (shift[i] < 1) {
        ++shift[i];
        break;
      }
      shift[i] = -1;
    }
    if (i == im.dim) break;
  }
  auto key = im.cell_hash(im.cell_of(p, {}));
  im.cells[key].push_back({Vec(p), payload});
  return -1;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// lattice quotients

std::vector<OrbitPoint> lattice_orbit(MatRef basis, VecRef center, Real radius,
                                      std::size_t max_points) {
  const Index n = basis.rows();
  if (basis.cols() != n || n < 1)
    throw std::invalid_argument("lattice_orbit: basis must be square");
  if (center.size() != n)
    throw std::invalid_argument("lattice_orbit: center dimension mismatch");
  if (!(radius >= 0.0))
    throw std::invalid_argument("lattice_orbit: radius must be nonnegative");

  Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Real sigma_min = svd.singularValues()[n - 1];
  if (!(sigma_min > 0.0))
    throw std::invalid_argument("lattice_orbit: basis is singular");
  const Vec anchor = svd.solve(center);  // |k - anchor| <= radius / sigma_min
  const Real reach = radius / sigma_min;

  std::vector<std::int64_t> lo(n), hi(n);
  std::size_t count = 1;
  for (Index i = 0; i < n; ++i) {
    lo[i] = static_cast<std::int64_t>(std::ceil(anchor[i] - reach));
    hi[i] = static_cast<std::int64_t>(std::floor(anchor[i] + reach));
    if (hi[i] < lo[i]) return {};
    const std::size_t width = static_cast<std::size_t>(hi[i] - lo[i] + 1);
    if (count > max_points / width + 1)
      throw budget_error("lattice orbit points", max_points);
    count *= width;
  }

  std::vector<OrbitPoint> orbit;
  Vec k(n);
  std::vector<std::int64_t> idx(lo);
  while (true) {
    for (Index i = 0; i < n; ++i) k[i] = static_cast<Real>(idx[i]);
    Vec point = basis * k;
    const Real dist = (point - center).norm();
    if (dist <= radius) {
      if (orbit.size() >= max_points)
        throw budget_error("lattice orbit points", max_points);
      OrbitPoint op;
      op.point = std::move(point);
      op.distance = dist;
      op.element = Isometry::make_translation(basis * k);
      orbit.push_back(std::move(op));
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
  sort_orbit(orbit);
  return orbit;
}

// ---------------------------------------------------------------------------
// QuotientSpace

struct QuotientSpace::Cache {
  mutable std::shared_mutex mu;
  std::vector<GroupElement> sorted;
  Real coverage = 0;
};

const Mat& QuotientSpace::basis() const {
  if (!is_lattice())
    throw std::invalid_argument("basis: not a lattice quotient");
  return basis_;
}

const Mat& QuotientSpace::basis_inverse() const {
  if (!is_lattice())
    throw std::invalid_argument("basis_inverse: not a lattice quotient");
  return basis_inverse_;
}

Real QuotientSpace::basis_sigma_min() const {
  if (!is_lattice())
    throw std::invalid_argument("basis_sigma_min: not a lattice quotient");
  return sigma_min_;
}

QuotientSpace QuotientSpace::lattice(MatRef basis) {
  const Index n = basis.rows();
  if (basis.cols() != n || n < 1)
    throw std::invalid_argument("lattice: basis must be square");
  Eigen::JacobiSVD<Mat> svd(basis);
  const Real sigma_min = svd.singularValues()[n - 1];
  const Real sigma_max = svd.singularValues()[0];
  if (!(sigma_min > 1e-12 * sigma_max))
    throw std::invalid_argument("lattice: basis is singular");

  QuotientSpace q(ModelSpace::euclidean(static_cast<int>(n)));
  q.basis_ = basis;
  q.basis_inverse_ = basis.inverse();
  q.sigma_min_ = sigma_min;
  q.base_ = Vec::Zero(n);
  for (Index i = 0; i < n; ++i) {
    Isometry g = Isometry::make_translation(basis.col(i));
    g.word = {static_cast<int>(i) + 1};
    q.generators_.push_back(std::move(g));
  }

  // Shortest nonzero vector by direct window scan: any vector shorter than
  // the shortest basis column has integer coordinates bounded by its length
  // over sigma_min.
  Real best = basis.colwise().norm().minCoeff();
  const auto reach = static_cast<std::int64_t>(std::floor(best / sigma_min));
  if (n * std::log(2.0 * static_cast<Real>(reach) + 1.0) > std::log(5e7))
    throw std::invalid_argument(
        "lattice: basis is too ill-conditioned for a shortest-vector scan");
  std::vector<std::int64_t> idx(n, -reach);
  Vec k(n);
  while (true) {
    for (Index i = 0; i < n; ++i) k[i] = static_cast<Real>(idx[i]);
    if (k.lpNorm<Eigen::Infinity>() > 0.0)
      best = std::min(best, (basis * k).norm());
    Index i = 0;
    for (; i < n; ++i) {
      if (idx[i] < reach) {
        ++idx[i];
        break;
      }
      idx[i] = -reach;
    }
    if (i == n) break;
  }
  q.min_displacement_ = best;

  // Circumradius of the centered fundamental parallelepiped: an upper bound
  // for the covering radius, used only as a length scale.
  Real circ = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Vec corner = Vec::Zero(n);
    for (Index i = 0; i < n; ++i)
      corner += (mask >> i & 1u ? 0.5 : -0.5) * basis.col(i);
    circ = std::max(circ, corner.norm());
  }
  q.domain_circumradius_ = circ;
  q.cache_ = std::make_shared<Cache>();
  return q;
}

QuotientSpace QuotientSpace::fuchsian(ModelSpace model,
                                      std::vector<Isometry> gens,
                                      Real domain_circumradius) {
  if (!model.is_hyperbolic())
    throw std::invalid_argument("fuchsian: model must be hyperbolic");
  if (gens.empty())
    throw std::invalid_argument("fuchsian: at least one generator required");
  if (!(domain_circumradius > 0.0))
    throw std::invalid_argument("fuchsian: domain circumradius must be > 0");
  QuotientSpace q(model);
  q.base_ = model.origin();
  Real min_disp = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (!is_deck_isometry(model, gens[i]))
      throw std::invalid_argument("fuchsian: generator " + std::to_string(i) +
                                  " does not preserve the Minkowski form");
    gens[i].matrix = minkowski_polish(std::move(gens[i].matrix));
    gens[i].word = {static_cast<int>(i) + 1};
    const Real disp = displacement(model, gens[i], q.base_);
    if (disp <= 1e-9)
      throw std::invalid_argument("fuchsian: generator " + std::to_string(i) +
                                  " fixes the base point");
    min_disp = std::min(min_disp, disp);
  }
  q.generators_ = std::move(gens);
  q.min_displacement_ = min_disp;
  q.domain_circumradius_ = domain_circumradius;
  q.cache_ = std::make_shared<Cache>();
  return q;
}

QuotientSpace QuotientSpace::genus2_octagon() {
  const ModelSpace h2 = ModelSpace::hyperbolic(2, -1.0);
  // Regular octagon with vertex angle pi/4: all eight corners meet at one
  // point downstairs, so the angles sum to 2 pi.  Its circumradius is
  // acosh(cot^2(pi/8)).
  const Real circum = std::acosh(3.0 + 2.0 * std::sqrt(2.0));
  const Vec o = h2.origin();
  std::array<Vec, 8> v;
  for (int j = 0; j < 8; ++j) {
    const Real ang = j * std::numbers::pi_v<Real> / 4.0;
    Vec dir = Vec::Zero(3);
    dir[1] = std::cos(ang);
    dir[2] = std::sin(ang);
    v[j] = exp_map(h2, o, circum * dir);
  }
  // Each generator glues one side to the opposite side with matching
  // boundary orientation; this pairing satisfies a b a' b' c d c' d' = 1.
  std::vector<Isometry> gens;
  gens.push_back(segment_isometry(h2, v[2], v[3], v[1], v[0]));
  gens.push_back(segment_isometry(h2, v[2], v[1], v[3], v[4]));
  gens.push_back(segment_isometry(h2, v[6], v[7], v[5], v[4]));
  gens.push_back(segment_isometry(h2, v[6], v[5], v[7], v[0]));
  return fuchsian(h2, std::move(gens), circum);
}

void QuotientSpace::grow_cache(Real target) const {
  // Caller holds the exclusive lock.  Ball volume grows exponentially with
  // the radius on the hyperbolic side, so the coverage radius grows by a
  // gentle factor rather than doubling past the needed value.
  Real r = std::max(cache_->coverage,
                    std::max(2.0 * domain_circumradius_, min_displacement_));
  while (r < target) r *= 1.25;

  std::vector<OrbitPoint> orbit;
  if (is_lattice()) {
    orbit = lattice_orbit(basis_, base_, r, max_nodes_);
  } else {
    orbit = orbit_ball(*this, base_, r);
  }
  std::vector<GroupElement> sorted;
  sorted.reserve(orbit.size());
  for (auto& op : orbit)
    sorted.push_back({std::move(op.element), op.distance});
  cache_->sorted = std::move(sorted);
  cache_->coverage = r;
}

void QuotientSpace::with_elements(
    Real radius, const std::function<void(std::span<const GroupElement>,
                                          Real coverage)>& fn) const {
  {
    std::shared_lock lock(cache_->mu);
    if (cache_->coverage >= radius && !cache_->sorted.empty()) {
      fn(std::span<const GroupElement>(cache_->sorted), cache_->coverage);
      return;
    }
  }
  std::unique_lock lock(cache_->mu);
  if (cache_->coverage < radius || cache_->sorted.empty()) grow_cache(radius);
  fn(std::span<const GroupElement>(cache_->sorted), cache_->coverage);
}

// ---------------------------------------------------------------------------
// orbit enumeration

std::vector<OrbitPoint> orbit_ball(const QuotientSpace& space, VecRef center,
                                   Real radius) {
  if (!(radius >= 0.0))
    throw std::invalid_argument("orbit_ball: radius must be nonnegative");
  const ModelSpace& model = space.model();
  if (center.size() != model.ambient_dim())
    throw std::invalid_argument("orbit_ball: center dimension mismatch");

  if (space.is_lattice()) {
    std::vector<OrbitPoint> orbit = lattice_orbit(
        space.basis(), Vec::Zero(center.size()), radius,
        space.max_enumeration_nodes());
    for (auto& op : orbit) op.point += center;
    return orbit;
  }

  std::vector<Isometry> steps;
  for (const auto& g : space.generators()) {
    steps.push_back(g);
    steps.push_back(inverse(g));
  }
  Real margin = 0.0;
  Real min_step = std::numeric_limits<Real>::infinity();
  for (const auto& s : steps) {
    const Real disp = displacement(model, s, center);
    margin = std::max(margin, disp);
    min_step = std::min(min_step, disp);
  }

  struct Node {
    Isometry element;
    Vec point;
    Real dist;
  };
  std::vector<Node> nodes;
  // Distinct orbit points are separated by at least the shortest translation
  // length of the group, while revisits of one element along different word
  // paths drift apart only by accumulated roundoff.  A merge window well
  // below the former and far above the latter keeps the walk from spawning
  // drifted duplicates of elements it has already seen.
  const Real merge_window = std::min<Real>(1.0, 0.25 * min_step);
  detail::PointDedup dedup(model.ambient_dim(), merge_window);
  nodes.push_back({Isometry::identity(model), Vec(center), 0.0});
  dedup.find_or_insert(center, 0);

  const std::size_t max_nodes = space.max_enumeration_nodes();
  // Breadth-first over generator words, visiting cover points as found.
  // Keeping every point within radius + margin guarantees that no point of
  // the ball is cut off from the identity in the search graph.
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes.size() > max_nodes)
      throw budget_error("orbit enumeration nodes", max_nodes);
    // nodes[head] may be invalidated by push_back; copy what we need.
    const Isometry parent = nodes[head].element;
    for (const auto& s : steps) {
      // Undoing the most recent letter only revisits the parent's parent.
      if (!parent.word.empty() && s.word.front() == -parent.word.front())
        continue;
      Isometry child = compose(s, parent);
      Vec point = reproject(model, apply(child, center));
      const Real dist = distance(model, center, point);
      if (dist > radius + margin) continue;
      const auto prior = dedup.find_or_insert(point, nodes.size());
      if (prior >= 0) {
        // Reaching one point along two word paths is fine: roundoff keeps
        // the copies within a sliver of the merge window, measured in the
        // metric of the space.  Two points that fall in one window yet sit
        // a sizable metric distance apart must come from distinct group
        // elements, which a free action with well-separated orbits forbids.
        const Vec& stored = nodes[static_cast<std::size_t>(prior)].point;
        if (distance(model, stored, point) > merge_window)
          throw std::invalid_argument(
              "orbit_ball: two distinct group elements moved the center to "
              "nearly the same point (the action is not free, or its orbits "
              "are too crowded to enumerate)");
        continue;
      }
      nodes.push_back({std::move(child), std::move(point), dist});
    }
  }

  std::vector<OrbitPoint> orbit;
  orbit.reserve(nodes.size());
  for (auto& n : nodes) {
    if (n.dist > radius) continue;
    OrbitPoint op;
    op.point = std::move(n.point);
    op.distance = n.dist;
    op.element = std::move(n.element);
    orbit.push_back(std::move(op));
  }
  sort_orbit(orbit);
  return orbit;
}

std::vector<OrbitPoint> word_ball_orbit(const QuotientSpace& space,
                                        VecRef center, Real radius,
                                        int max_word_length) {
  if (space.is_lattice())
    throw std::invalid_argument("word_ball_orbit: fuchsian groups only");
  if (max_word_length < 0)
    throw std::invalid_argument("word_ball_orbit: negative word length");
  const ModelSpace& model = space.model();

  std::vector<Isometry> steps;
  for (const auto& g : space.generators()) {
    steps.push_back(g);
    steps.push_back(inverse(g));
  }
  Real min_step = std::numeric_limits<Real>::infinity();
  for (const auto& s : steps)
    min_step = std::min(min_step, displacement(model, s, center));

  struct Node {
    Isometry element;
    Vec point;
    Real dist;
    int length;
  };
  std::vector<Node> nodes;
  // Same merge-window reasoning as in orbit_ball.
  detail::PointDedup dedup(model.ambient_dim(),
                           std::min<Real>(1.0, 0.25 * min_step));
  nodes.push_back({Isometry::identity(model), Vec(center), 0.0, 0});
  dedup.find_or_insert(center, 0);

  const std::size_t max_nodes = space.max_enumeration_nodes();
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes[head].length >= max_word_length) continue;
    if (nodes.size() > max_nodes)
      throw budget_error("orbit enumeration nodes", max_nodes);
    const Isometry parent = nodes[head].element;
    const int child_length = nodes[head].length + 1;
    for (const auto& s : steps) {
      if (!parent.word.empty() && s.word.front() == -parent.word.front())
        continue;
      Isometry child = compose(s, parent);
      Vec point = reproject(model, apply(child, center));
      if (dedup.find_or_insert(point, nodes.size()) >= 0) continue;
      const Real dist = distance(model, center, point);
      nodes.push_back({std::move(child), std::move(point), dist, child_length});
    }
  }

  std::vector<OrbitPoint> orbit;
  for (auto& n : nodes) {
    if (n.dist > radius) continue;
    OrbitPoint op;
    op.point = std::move(n.point);
    op.distance = n.dist;
    op.element = std::move(n.element);
    orbit.push_back(std::move(op));
  }
  sort_orbit(orbit);
  return orbit;
}

Real fiber_gap(const std::vector<OrbitPoint>& orbit, std::size_t k,
               Real tie_tol) {
  if (k < 1) throw std::invalid_argument("fiber_gap: k must be at least 1");
  if (orbit.size() < k)
    throw std::invalid_argument("fiber_gap: orbit has fewer than k points");
  if (orbit.size() == k) return 0.0;
  std::vector<Real> d(orbit.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) d[i] = orbit[i].distance;
  std::sort(d.begin(), d.end());
  const Real gap = d[k] - d[k - 1];
  return gap <= tie_tol ? 0.0 : gap;
}

}  // namespace geolab

#include "geolab/experiments.hpp"

#include "geolab/parallel.hpp"
#include "geolab/random.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

namespace geolab {

namespace {

struct Claim {
  std::string name;
  bool passed = false;
  std::string detail;
};

Json claims_to_json(const std::vector<Claim>& claims) {
  Json arr = Json::array();
  for (const auto& c : claims)
    arr.push_back(Json{{"name", c.name}, {"passed", c.passed},
                       {"detail", c.detail}});
  return arr;
}

bool all_passed(const std::vector<Claim>& claims) {
  for (const auto& c : claims)
    if (!c.passed) return false;
  return true;
}

std::string fmt(Real x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

Json search_defaults() {
  return Json{{"initial_step", 0.0},    {"shrink", 0.5},
              {"stop_step", 1e-8},      {"max_iterations", 200000},
              {"n_probes", 16},         {"certify_directions", 64},
              {"max_certify_rounds", 25}};
}

SearchSchedule schedule_from(const Json& cfg, std::uint64_t rng_seed) {
  SearchSchedule s;
  s.initial_step = cfg.value("initial_step", 0.0);
  s.shrink = cfg.value("shrink", 0.5);
  s.stop_step = cfg.value("stop_step", 1e-8);
  s.max_iterations = cfg.value("max_iterations", 200000);
  s.n_probes = cfg.value("n_probes", 16);
  s.certify_directions = cfg.value("certify_directions", 64);
  s.max_certify_rounds = cfg.value("max_certify_rounds", 25);
  s.rng_seed = rng_seed;
  return s;
}

// Pseudo-random point within the given distance of the base point.
Vec random_ball_point(const QuotientSpace& space, std::mt19937_64& rng,
                      Real radius) {
  const ModelSpace& model = space.model();
  std::uniform_real_distribution<Real> uniform(0.0, 1.0);
  const Vec dir = unit_sphere_sample(rng, model.dim());
  const Real r = radius * std::sqrt(uniform(rng));
  const Mat basis = tangent_basis(model, space.base_point());
  return exp_map(model, space.base_point(), r * (basis * dir));
}

Vec random_ball_point(const ModelSpace& model, std::mt19937_64& rng,
                      Real radius) {
  std::uniform_real_distribution<Real> uniform(0.0, 1.0);
  const Vec dir = unit_sphere_sample(rng, model.dim());
  const Real r = radius * std::sqrt(uniform(rng));
  const Mat basis = tangent_basis(model, model.origin());
  return exp_map(model, model.origin(), r * (basis * dir));
}

// ---------------------------------------------------------------------------
// torus

Json torus_defaults() {
  return Json{
      {"basis", {{1.0, 0.0}, {0.0, 1.0}}},
      {"probe_point", {0.5, 0.5}},
      {"expected_distance", nullptr},
      {"expected_order", nullptr},
      {"farthest_grid", 0},
      {"expected_max_order", nullptr},
      {"tolerances",
       {{"distance", 1e-12}, {"min_tol", 1e-7}, {"dir_tol", 1e-6}}},
      {"search", search_defaults()},
      {"seed", 20240817}};
}

void run_torus(const Json& cfg, Json& results, std::vector<Claim>& claims) {
  const Json& basis_json = cfg.at("basis");
  const auto n = static_cast<Index>(basis_json.size());
  Mat basis(n, n);
  for (Index c = 0; c < n; ++c)
    basis.col(c) = vec_from_json(basis_json[static_cast<std::size_t>(c)]);
  const QuotientSpace space = QuotientSpace::lattice(basis);
  results["space"] = to_json(space);

  const Real min_tol = cfg.at("tolerances").value("min_tol", 1e-7);
  const Real dir_tol = cfg.at("tolerances").value("dir_tol", 1e-6);
  const Real dist_tol = cfg.at("tolerances").value("distance", 1e-12);
  const auto seed = cfg.value("seed", 20240817ull);

  if (!cfg.at("probe_point").is_null()) {
    const Vec p1 = Vec::Zero(n);
    const Vec p2 = vec_from_json(cfg.at("probe_point"));
    const SegmentBundle bundle = segment_bundle(space, p1, p2, min_tol, dir_tol);
    results["probe"] = to_json(bundle);

    if (!cfg.at("expected_distance").is_null()) {
      const Real expected = cfg.at("expected_distance").get<Real>();
      const Real err = std::abs(bundle.distance - expected);
      claims.push_back({"probe_distance", err <= dist_tol,
                        "distance " + fmt(bundle.distance) + ", expected " +
                            fmt(expected) + ", error " + fmt(err)});
    }
    if (!cfg.at("expected_order").is_null()) {
      const int expected = cfg.at("expected_order").get<int>();
      claims.push_back({"probe_order", bundle.order == expected,
                        "order " + std::to_string(bundle.order) +
                            ", expected " + std::to_string(expected)});
    }
  }

  const int grid = cfg.value("farthest_grid", 0);
  if (grid > 0) {
    const std::size_t cells = static_cast<std::size_t>(grid) * grid;
    std::vector<int> orders(cells, 0);
    std::vector<Real> values(cells, 0.0);
    std::vector<char> converged(cells, 0);
    const Vec origin = Vec::Zero(n);
    const Json& search_cfg = cfg.at("search");

    parallel_for(cells, [&](std::size_t idx) {
      const int i = static_cast<int>(idx) / grid;
      const int j = static_cast<int>(idx) % grid;
      Vec frac(n);
      frac.setZero();
      frac[0] = (i + 0.5) / grid;
      frac[n > 1 ? 1 : 0] = (j + 0.5) / grid;
      const Vec start = basis * frac;
      SearchSchedule sched =
          schedule_from(search_cfg, mix_seed(seed, 1000 + idx));
      try {
        const MaxPair mp = find_farthest_point(space, origin, {start}, sched);
        orders[idx] = mp.bundle.order;
        values[idx] = mp.value;
        converged[idx] = 1;
      } catch (const search_error&) {
        converged[idx] = 0;
      }
    });

    int max_order = 0;
    Real max_value = 0.0;
    std::size_t n_converged = 0;
    std::map<int, long> histogram;
    for (std::size_t idx = 0; idx < cells; ++idx) {
      if (!converged[idx]) continue;
      ++n_converged;
      max_order = std::max(max_order, orders[idx]);
      max_value = std::max(max_value, values[idx]);
      ++histogram[orders[idx]];
    }
    Json hist = Json::object();
    for (const auto& [order, count] : histogram)
      hist[std::to_string(order)] = count;
    results["farthest_grid"] =
        Json{{"grid", grid},
             {"converged", n_converged},
             {"max_order", max_order},
             {"max_distance", max_value},
             {"order_histogram", std::move(hist)}};

    claims.push_back({"grid_all_converged", n_converged == cells,
                      std::to_string(n_converged) + " of " +
                          std::to_string(cells) + " searches stagnated"});
    if (!cfg.at("expected_max_order").is_null()) {
      const int expected = cfg.at("expected_max_order").get<int>();
      claims.push_back({"grid_max_order", max_order == expected,
                        "max order " + std::to_string(max_order) +
                            ", expected " + std::to_string(expected)});
    }
  }
}

// ---------------------------------------------------------------------------
// hyperbolic surface

Json hyperbolic_defaults() {
  return Json{{"space", "genus2_octagon"},
              {"mode", "pair_max"},
              {"n_seeds", 8},
              {"seed_radius", nullptr},
              {"min_order", 5},
              {"require_margin", true},
              {"probe", {{"radius", 1e-3}, {"n_directions", 64}}},
              {"search", search_defaults()},
              {"seed", 20240817}};
}

void run_hyperbolic(const Json& cfg, Json& results,
                    std::vector<Claim>& claims) {
  if (cfg.at("space").is_string() &&
      cfg.at("space").get<std::string>() != "genus2_octagon")
    throw std::invalid_argument("hyperbolic: unknown surface name");
  const QuotientSpace space = cfg.at("space").is_string()
                                  ? QuotientSpace::genus2_octagon()
                                  : quotient_space_from_json(cfg.at("space"));
  results["space"] = to_json(space);

  const auto seed = cfg.value("seed", 20240817ull);
  const int n_seeds = cfg.value("n_seeds", 8);
  if (n_seeds < 1)
    throw std::invalid_argument("hyperbolic: n_seeds must be positive");
  const Real seed_radius = cfg.at("seed_radius").is_null()
                               ? space.domain_circumradius()
                               : cfg.at("seed_radius").get<Real>();
  const bool pointed = cfg.at("mode").get<std::string>() == "pointed_max";
  const SearchSchedule sched =
      schedule_from(cfg.at("search"), mix_seed(seed, 99));

  auto rng = seeded_engine(seed, 7);
  MaxPair best;
  bool searched = false;
  std::string search_detail;
  try {
    if (pointed) {
      std::vector<Vec> seeds;
      for (int i = 0; i < n_seeds; ++i)
        seeds.push_back(random_ball_point(space, rng, seed_radius));
      best = find_farthest_point(space, space.base_point(), seeds, sched);
    } else {
      std::vector<std::pair<Vec, Vec>> seeds;
      for (int i = 0; i < n_seeds; ++i) {
        Vec a = random_ball_point(space, rng, seed_radius);
        Vec b = random_ball_point(space, rng, seed_radius);
        seeds.emplace_back(std::move(a), std::move(b));
      }
      best = find_max_pair(space, seeds, sched);
    }
    searched = true;
    search_detail = "value " + fmt(best.value) + " at final step " +
                    fmt(best.final_step);
  } catch (const search_error& err) {
    best = err.best_iterate;
    search_detail = err.what();
  }

  std::string probe_detail;
  if (searched && cfg.value("require_margin", true)) {
    const Real radius = cfg.at("probe").value("radius", 1e-3);
    const int dirs = cfg.at("probe").value("n_directions", 64);
    try {
      best.certificate =
          strict_max_probe(space, best, radius, dirs, mix_seed(seed, 4242));
      probe_detail = "margin " + fmt(best.certificate->margin) + " at radius " +
                     fmt(radius);
    } catch (const std::invalid_argument& err) {
      probe_detail = err.what();
    }
  }
  results["max_pair"] = to_json(best);

  claims.push_back({"search_stagnated",
                    searched && best.converged &&
                        best.final_step <= sched.stop_step,
                    search_detail});
  const int min_order = cfg.value("min_order", 5);
  claims.push_back({"order_at_least_" + std::to_string(min_order),
                    searched && best.bundle.order >= min_order,
                    "order " + std::to_string(best.bundle.order)});
  if (cfg.value("require_margin", true))
    claims.push_back({"strict_probe_margin_positive",
                      best.certificate && best.certificate->margin > 0.0,
                      probe_detail});
}

// ---------------------------------------------------------------------------
// convexity suite

Json convexity_defaults() {
  return Json{{"curvature", -1.0},
              {"n_midpoint", 100000},
              {"n_comparison", 10000},
              {"n_profiles", 32},
              {"sample_radius", 2.0},
              {"collinearity_floor", 1e-4},
              {"comparison_tol", 1e-9},
              {"profile_h", 1e-3},
              {"profile_tol", 1e-9},
              {"seed", 20240817}};
}

void run_convexity(const Json& cfg, Json& results, std::vector<Claim>& claims,
                   std::string& csv) {
  const Real curvature = cfg.value("curvature", -1.0);
  if (!(curvature < 0.0))
    throw std::invalid_argument("convexity: curvature must be negative");
  const ModelSpace space = ModelSpace::hyperbolic(2, curvature);

  const long n_midpoint = cfg.value("n_midpoint", 100000);
  const long n_comparison = cfg.value("n_comparison", 10000);
  const long n_profiles = cfg.value("n_profiles", 32);
  const Real sample_radius = cfg.value("sample_radius", 2.0);
  const Real floor = cfg.value("collinearity_floor", 1e-4);
  const Real cmp_tol = cfg.value("comparison_tol", 1e-9);
  const Real h = cfg.value("profile_h", 1e-3);
  const Real profile_tol = cfg.value("profile_tol", 1e-9);
  const auto seed = cfg.value("seed", 20240817ull);

  auto sample_noncollinear = [&](std::mt19937_64& rng, int count) {
    std::vector<Vec> pts;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      pts.clear();
      for (int i = 0; i < count; ++i)
        pts.push_back(random_ball_point(space, rng, sample_radius));
      if (collinearity_residual(space, pts) >= floor) return pts;
    }
    throw std::runtime_error("convexity: failed to sample a non-collinear "
                             "configuration");
  };

  // Midpoint inequality sweep.
  std::vector<Real> margins(static_cast<std::size_t>(n_midpoint));
  parallel_for(margins.size(), [&](std::size_t i) {
    auto rng = seeded_engine(seed, 0x11d0 + i);
    const auto pts = sample_noncollinear(rng, 4);
    margins[i] = midpoint_check(space, pts[0], pts[1], pts[2], pts[3]).margin;
  });
  long midpoint_violations = 0;
  Real min_margin = std::numeric_limits<Real>::infinity();
  for (const Real m : margins) {
    if (m <= 0.0) ++midpoint_violations;
    min_margin = std::min(min_margin, m);
  }
  results["midpoint"] = Json{{"trials", n_midpoint},
                             {"violations", midpoint_violations},
                             {"min_margin", min_margin}};
  claims.push_back({"midpoint_strict_no_violation", midpoint_violations == 0,
                    std::to_string(midpoint_violations) +
                        " violations, min margin " + fmt(min_margin)});

  // Chord comparison sweep against flatter model planes.
  std::vector<Real> slacks(static_cast<std::size_t>(n_comparison));
  parallel_for(slacks.size(), [&](std::size_t i) {
    auto rng = seeded_engine(seed, 0xc3a0 + i);
    std::uniform_real_distribution<Real> uniform(0.0, 1.0);
    const auto pts = sample_noncollinear(rng, 3);
    const Real t_ab = uniform(rng);
    const Real t_ac = uniform(rng);
    const Real u = uniform(rng);
    Real chi_cmp;
    if (u < 0.25)
      chi_cmp = 0.0;
    else if (u < 0.5)
      chi_cmp = curvature;
    else
      chi_cmp = curvature * uniform(rng);
    slacks[i] =
        comparison_check(space, pts[0], pts[1], pts[2], t_ab, t_ac, chi_cmp)
            .slack;
  });
  long comparison_violations = 0;
  Real min_slack = std::numeric_limits<Real>::infinity();
  for (const Real s : slacks) {
    if (s < -cmp_tol) ++comparison_violations;
    min_slack = std::min(min_slack, s);
  }
  results["comparison"] = Json{{"trials", n_comparison},
                               {"violations", comparison_violations},
                               {"min_slack", min_slack}};
  claims.push_back({"comparison_chords_bounded", comparison_violations == 0,
                    std::to_string(comparison_violations) +
                        " violations, min slack " + fmt(min_slack)});

  // Random profiles must never report a convexity violation.
  long profile_violations = 0;
  Real worst_d2 = std::numeric_limits<Real>::infinity();
  for (long i = 0; i < n_profiles; ++i) {
    auto rng = seeded_engine(seed, 0x9f0 + static_cast<std::uint64_t>(i));
    const auto pts = sample_noncollinear(rng, 4);
    const auto g1 = segment_between(space, pts[0], pts[1]);
    const auto g2 = segment_between(space, pts[2], pts[3]);
    const auto pair_report = pair_profile(space, g1, g2, h, profile_tol);
    const auto pt_report =
        pointed_profile(space, pts[0], segment_between(space, pts[2], pts[3]),
                        h, profile_tol);
    for (const auto* rep : {&pair_report, &pt_report}) {
      worst_d2 = std::min(worst_d2, rep->min_second_difference);
      if (rep->classification == ConvexityClass::violation)
        ++profile_violations;
    }
  }
  results["profiles"] = Json{{"trials", n_profiles},
                             {"violations", profile_violations},
                             {"min_second_difference", worst_d2}};
  claims.push_back({"profiles_never_violate", profile_violations == 0,
                    std::to_string(profile_violations) +
                        " violations, min second difference " + fmt(worst_d2)});

  // Constructed flat configurations along one geodesic line: the profile
  // must flag the constant stretch instead of calling it a violation.
  const Vec origin = space.origin();
  const Mat frame = tangent_basis(space, origin);
  auto line_point = [&](Real s) {
    return exp_map(space, origin, s * frame.col(0));
  };
  const auto flat_pair =
      pair_profile(space,
                   segment_between(space, line_point(-1.0), line_point(0.5)),
                   segment_between(space, line_point(-0.2), line_point(1.3)),
                   h, profile_tol);
  const auto flat_pointed = pointed_profile(
      space, line_point(-2.0),
      segment_between(space, line_point(0.0), line_point(1.0)), h, profile_tol);
  results["flat_pair"] = to_json(flat_pair);
  results["flat_pointed"] = to_json(flat_pointed);
  claims.push_back(
      {"flat_pair_constant_on_line",
       flat_pair.classification == ConvexityClass::convex_constant_on_line &&
           flat_pair.collinear_configuration,
       "min second difference " + fmt(flat_pair.min_second_difference)});
  claims.push_back(
      {"flat_pointed_constant_on_line",
       flat_pointed.classification ==
               ConvexityClass::convex_constant_on_line &&
           flat_pointed.collinear_configuration,
       "min second difference " + fmt(flat_pointed.min_second_difference)});

  std::ostringstream csv_os;
  csv_os << "profile,index,t,value\n";
  for (const auto& [name, rep] :
       {std::pair<const char*, const ConvexityReport&>{"flat_pair", flat_pair},
        {"flat_pointed", flat_pointed}}) {
    for (std::size_t i = 0; i < rep.samples.size(); ++i)
      csv_os << name << ',' << i << ',' << rep.samples[i].first << ','
             << rep.samples[i].second << '\n';
  }
  csv = csv_os.str();
}

// ---------------------------------------------------------------------------
// half-space cover sweep

Json halfspace_defaults() {
  return Json{{"n_systems", 1000},
              {"max_dimension", 5},
              {"n_samples", 20000},
              {"covering_fraction", 0.3},
              {"seed", 20240817}};
}

void run_halfspace(const Json& cfg, Json& results,
                   std::vector<Claim>& claims) {
  const long n_systems = cfg.value("n_systems", 1000);
  const int max_dim = cfg.value("max_dimension", 5);
  const long n_samples = cfg.value("n_samples", 20000);
  const Real covering_fraction = cfg.value("covering_fraction", 0.3);
  const auto seed = cfg.value("seed", 20240817ull);
  if (max_dim < 2)
    throw std::invalid_argument("halfspace: max_dimension must be >= 2");

  struct Outcome {
    bool covers = false;
    bool counterexample = false;
    int n = 0, k = 0, dim = 0;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(n_systems));

  parallel_for(outcomes.size(), [&](std::size_t i) {
    auto rng = seeded_engine(seed, 0x4a1f + i);
    std::uniform_real_distribution<Real> uniform(0.0, 1.0);
    std::uniform_int_distribution<int> dim_pick(2, max_dim);
    const int n = dim_pick(rng);
    const bool covering = uniform(rng) < covering_fraction;
    int k;
    Mat normals;
    if (covering && n >= 2) {
      std::uniform_int_distribution<int> k_pick(2, n);
      k = k_pick(rng);
      normals.resize(k, n);
      const Vec a = unit_sphere_sample(rng, n);
      normals.row(0) = a.transpose();
      normals.row(1) = -a.transpose();
      for (int r = 2; r < k; ++r)
        normals.row(r) = unit_sphere_sample(rng, n).transpose();
    } else {
      std::uniform_int_distribution<int> k_pick(1, n);
      k = k_pick(rng);
      normals.resize(k, n);
      for (int r = 0; r < k; ++r)
        normals.row(r) = unit_sphere_sample(rng, n).transpose();
    }
    const auto sys = make_halfspace_system(normals);
    const auto report =
        halfspace_cover_check(sys, n_samples, mix_seed(seed, 0xab00 + i));
    Outcome& out = outcomes[i];
    out.covers = report.covers;
    out.n = n;
    out.k = k;
    out.dim = report.dim_intersection;
    out.counterexample = report.covers && report.dim_intersection < n - k + 1;
  });

  long covered = 0;
  Json counterexamples = Json::array();
  for (const auto& out : outcomes) {
    if (out.covers) ++covered;
    if (out.counterexample)
      counterexamples.push_back(Json{
          {"n", out.n}, {"k", out.k}, {"dim_intersection", out.dim}});
  }
  results["systems"] = n_systems;
  results["covering_detected"] = covered;
  results["counterexamples"] = counterexamples;
  claims.push_back(
      {"cover_implies_intersection_dimension", counterexamples.empty(),
       std::to_string(counterexamples.size()) + " counterexamples among " +
           std::to_string(n_systems) + " systems (" + std::to_string(covered) +
           " covering)"});
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"torus", "hyperbolic", "convexity", "halfspace"};
}

Json default_config(const std::string& experiment) {
  if (experiment == "torus") return torus_defaults();
  if (experiment == "hyperbolic") return hyperbolic_defaults();
  if (experiment == "convexity") return convexity_defaults();
  if (experiment == "halfspace") return halfspace_defaults();
  throw std::invalid_argument("unknown experiment: " + experiment);
}

void apply_override(Json& config, const std::string& path,
                    const std::string& value) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char ch : path) {
    if (ch == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch == '-' ? '_' : ch);
    }
  }
  parts.push_back(cur);
  if (parts.empty() || parts.front().empty())
    throw std::invalid_argument("empty override path");

  Json* node = &config;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i]))
      throw std::invalid_argument("unknown config field: " + path);
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() || !node->contains(parts.back()))
    throw std::invalid_argument("unknown config field: " + path);

  const Json parsed = Json::parse(value, nullptr, false);
  (*node)[parts.back()] = parsed.is_discarded() ? Json(value) : parsed;
}

namespace {

void merge_config(Json& base, const Json& patch, const std::string& prefix) {
  if (!patch.is_object())
    throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : patch.items()) {
    if (!base.contains(key))
      throw std::invalid_argument("unknown config field: " + prefix + key);
    Json& slot = base[key];
    if (slot.is_object() && value.is_object())
      merge_config(slot, value, prefix + key + ".");
    else
      slot = value;
  }
}

}  // namespace

Json effective_config(const std::string& experiment, const Json& config) {
  Json cfg = default_config(experiment);
  merge_config(cfg, config, "");
  return cfg;
}

ExperimentOutcome run_experiment(const std::string& experiment,
                                 const Json& config) {
  Json cfg = effective_config(experiment, config);

  const auto start = std::chrono::steady_clock::now();
  Json results = Json::object();
  std::vector<Claim> claims;
  std::string csv;
  if (experiment == "torus")
    run_torus(cfg, results, claims);
  else if (experiment == "hyperbolic")
    run_hyperbolic(cfg, results, claims);
  else if (experiment == "convexity")
    run_convexity(cfg, results, claims, csv);
  else if (experiment == "halfspace")
    run_halfspace(cfg, results, claims);
  else
    throw std::invalid_argument("unknown experiment: " + experiment);
  const auto stop = std::chrono::steady_clock::now();

  ExperimentOutcome outcome;
  outcome.passed = all_passed(claims);
  outcome.csv = std::move(csv);
  outcome.report =
      Json{{"experiment", experiment},
           {"config", cfg},
           {"results", std::move(results)},
           {"claims", claims_to_json(claims)},
           {"passed", outcome.passed},
           {"timing",
            {{"wall_seconds",
              std::chrono::duration<double>(stop - start).count()}}}};
  return outcome;
}

}  // namespace geolab

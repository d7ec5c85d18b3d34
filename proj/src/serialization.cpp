#include "geolab/serialization.hpp"

#include <ostream>

namespace geolab {

Json to_json(VecRef v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("expected a nonempty coordinate array");
  Vec v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v[i] = j[static_cast<std::size_t>(i)].get<Real>();
  return v;
}

Json to_json(const GeodesicSegment& seg) {
  return Json{{"start", to_json(seg.start)},
              {"end", to_json(seg.end)},
              {"length", seg.length},
              {"initial_direction", to_json(seg.initial_direction)}};
}

Json to_json(const ProbeCertificate& cert) {
  return Json{{"margin", cert.margin},
              {"radius", cert.radius},
              {"n_directions", cert.n_directions}};
}

Json to_json(const SegmentBundle& bundle) {
  Json lifts = Json::array();
  for (const auto& lift : bundle.lifts) lifts.push_back(to_json(lift));
  Json segments = Json::array();
  for (const auto& seg : bundle.segments) segments.push_back(to_json(seg));
  return Json{{"p1", to_json(bundle.p1)},
              {"p2", to_json(bundle.p2)},
              {"distance", bundle.distance},
              {"order", bundle.order},
              {"near_tie", bundle.near_tie},
              {"min_tol_rel", bundle.min_tol_rel},
              {"dir_tol", bundle.dir_tol},
              {"lifts", lifts},
              {"segments", segments}};
}

Json to_json(const MaxPair& pair) {
  Json j{{"p1", to_json(pair.p1)},
         {"p2", to_json(pair.p2)},
         {"value", pair.value},
         {"kind", pair.kind == ExtremumKind::pair_max ? "pair_max"
                                                      : "pointed_max"},
         {"converged", pair.converged},
         {"iterations", pair.iterations},
         {"evaluations", pair.evaluations},
         {"final_step", pair.final_step},
         {"seed_index", pair.seed_index},
         {"bundle", to_json(pair.bundle)}};
  if (pair.certificate) j["certificate"] = to_json(*pair.certificate);
  return j;
}

namespace {

const char* class_name(ConvexityClass c) {
  switch (c) {
    case ConvexityClass::strictly_convex: return "strictly_convex";
    case ConvexityClass::convex_constant_on_line:
      return "convex_constant_on_line";
    case ConvexityClass::violation: return "violation";
  }
  return "unknown";
}

}  // namespace

Json to_json(const ConvexityReport& report) {
  return Json{{"h", report.h},
              {"tol", report.tol},
              {"n_samples", report.n_samples},
              {"min_second_difference", report.min_second_difference},
              {"classification", class_name(report.classification)},
              {"collinear_configuration", report.collinear_configuration}};
}

Json to_json(const CoverReport& report) {
  Json j{{"covers", report.covers},
         {"dim_intersection", report.dim_intersection},
         {"n_samples", report.n_samples}};
  if (report.uncovered_direction)
    j["uncovered_direction"] = to_json(*report.uncovered_direction);
  return j;
}

Json to_json(const QuotientSpace& space) {
  Json j{{"kind", space.is_lattice() ? "lattice" : "fuchsian"},
         {"dimension", space.model().dim()},
         {"curvature", space.model().curvature()}};
  Json gens = Json::array();
  if (space.is_lattice()) {
    for (Index c = 0; c < space.basis().cols(); ++c)
      gens.push_back(to_json(space.basis().col(c)));
  } else {
    j["domain_circumradius"] = space.domain_circumradius();
    for (const auto& g : space.generators()) {
      Json flat = Json::array();
      for (Index r = 0; r < g.matrix.rows(); ++r)
        for (Index c = 0; c < g.matrix.cols(); ++c)
          flat.push_back(g.matrix(r, c));
      gens.push_back(std::move(flat));
    }
  }
  j["generators"] = std::move(gens);
  return j;
}

QuotientSpace quotient_space_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.at("dimension").get<int>();
  const Real curvature = j.at("curvature").get<Real>();
  const Json& gens = j.at("generators");
  if (!gens.is_array() || gens.empty())
    throw std::invalid_argument("quotient space: generators must be a "
                                "nonempty array");

  if (kind == "lattice") {
    if (curvature != 0.0)
      throw std::invalid_argument("quotient space: lattice curvature must be 0");
    if (static_cast<int>(gens.size()) != dim)
      throw std::invalid_argument(
          "quotient space: a lattice needs dimension-many basis vectors");
    Mat basis(dim, dim);
    for (Index c = 0; c < dim; ++c) {
      const Vec col = vec_from_json(gens[static_cast<std::size_t>(c)]);
      if (col.size() != dim)
        throw std::invalid_argument("quotient space: basis vector length");
      basis.col(c) = col;
    }
    return QuotientSpace::lattice(basis);
  }
  if (kind == "fuchsian") {
    const ModelSpace model = ModelSpace::hyperbolic(dim, curvature);
    const Index m = model.ambient_dim();
    std::vector<Isometry> isos;
    for (const auto& g : gens) {
      const Vec flat = vec_from_json(g);
      if (flat.size() != m * m)
        throw std::invalid_argument(
            "quotient space: generator matrices must be row-major with "
            "(dim+1)^2 entries");
      Mat mat(m, m);
      for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) mat(r, c) = flat[r * m + c];
      isos.push_back(Isometry::make_linear(mat));
    }
    const Real circum = j.at("domain_circumradius").get<Real>();
    return QuotientSpace::fuchsian(model, std::move(isos), circum);
  }
  throw std::invalid_argument("quotient space: kind must be lattice or "
                              "fuchsian");
}

void write_profile_csv(std::ostream& os, const ConvexityReport& report) {
  os << "index,t,value\n";
  for (std::size_t i = 0; i < report.samples.size(); ++i)
    os << i << ',' << report.samples[i].first << ','
       << report.samples[i].second << '\n';
}

}  // namespace geolab

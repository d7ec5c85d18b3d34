#pragma once

#include "geolab/convexity.hpp"
#include "geolab/quotient_metric.hpp"

#include "json.hpp"

#include <iosfwd>

namespace geolab {

using Json = nlohmann::ordered_json;

Json to_json(VecRef v);
Vec vec_from_json(const Json& j);

Json to_json(const GeodesicSegment& seg);
Json to_json(const ProbeCertificate& cert);
Json to_json(const SegmentBundle& bundle);
Json to_json(const MaxPair& pair);
Json to_json(const ConvexityReport& report);
Json to_json(const CoverReport& report);

// {"kind": "lattice"|"fuchsian", "dimension", "curvature", "generators"}
// with generators stored as basis vectors (lattice) or row-major ambient
// matrices (fuchsian, plus "domain_circumradius").
Json to_json(const QuotientSpace& space);
QuotientSpace quotient_space_from_json(const Json& j);

// One row per profile sample: index,t,value.
void write_profile_csv(std::ostream& os, const ConvexityReport& report);

}  // namespace geolab

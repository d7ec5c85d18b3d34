#pragma once

#include "geolab/serialization.hpp"

#include <string>
#include <vector>

namespace geolab {

// A finished experiment: the JSON report (deterministic for a fixed config
// and seed, except for the "timing" section), the aggregate verdict over
// the report's claims, and optional CSV sample rows.
struct ExperimentOutcome {
  Json report;
  bool passed = false;
  std::string csv;
};

std::vector<std::string> experiment_names();

Json default_config(const std::string& experiment);

// Defaults overlaid with the given (possibly sparse) config.  Unknown
// fields are rejected; nested objects merge field by field.
Json effective_config(const std::string& experiment, const Json& config);

// Sets config[path] = value, where path is dot-separated with hyphens
// standing for underscores (clamps to existing structure; unknown fields
// are rejected).  The value string is parsed as JSON when possible and
// treated as a plain string otherwise.
void apply_override(Json& config, const std::string& path,
                    const std::string& value);

ExperimentOutcome run_experiment(const std::string& experiment,
                                 const Json& config);

}  // namespace geolab

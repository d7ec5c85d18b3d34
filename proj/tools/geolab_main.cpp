#include "geolab/experiments.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

// Remaining tokens of the form `--nested.field value` (or
// `--nested.field=value`) become config overrides; hyphens in field names
// stand for underscores.
void apply_cli_overrides(geolab::Json& config,
                         const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& token = extras[i];
    if (token.rfind("--", 0) != 0)
      throw std::runtime_error("unexpected argument: " + token);
    std::string path = token.substr(2);
    std::string value;
    if (const auto eq = path.find('='); eq != std::string::npos) {
      value = path.substr(eq + 1);
      path.resize(eq);
    } else {
      if (i + 1 >= extras.size())
        throw std::runtime_error("missing value for override " + token);
      value = extras[++i];
    }
    geolab::apply_override(config, path, value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "geolab: numerical experiments on shortest paths and their "
      "multiplicity in flat and hyperbolic quotient spaces"};
  app.allow_extras();

  std::string experiment;
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  bool print_config = false;

  std::string names;
  for (const auto& n : geolab::experiment_names())
    names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_path,
                 "JSON config file; omitted fields keep their defaults");
  app.add_option("--out", out_path,
                 "write the JSON report here (stdout when omitted)");
  app.add_option("--csv", csv_path,
                 "write CSV sample rows here (experiments that emit them)");
  app.add_flag("--print-config", print_config,
               "print the effective config and exit without running");

  CLI11_PARSE(app, argc, argv);

  try {
    geolab::Json file_config = geolab::Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw std::runtime_error("cannot open config file: " + config_path);
      in >> file_config;
    }

    geolab::Json config = geolab::effective_config(experiment, file_config);
    apply_cli_overrides(config, app.remaining());

    if (print_config) {
      std::cout << config.dump(2) << '\n';
      return 0;
    }

    const geolab::ExperimentOutcome outcome =
        geolab::run_experiment(experiment, config);

    if (out_path.empty()) {
      std::cout << outcome.report.dump(2) << '\n';
    } else {
      std::ofstream out(out_path);
      if (!out)
        throw std::runtime_error("cannot open output file: " + out_path);
      out << outcome.report.dump(2) << '\n';
    }
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      if (!csv)
        throw std::runtime_error("cannot open CSV file: " + csv_path);
      csv << outcome.csv;
    }

    for (const auto& claim : outcome.report.at("claims"))
      std::cerr << (claim.at("passed").get<bool>() ? "PASS " : "FAIL ")
                << claim.at("name").get<std::string>() << ": "
                << claim.at("detail").get<std::string>() << '\n';
    return outcome.passed ? 0 : 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
}

// Declarative experiments: JSON configuration, execution over a refinement
// chain, and the JSON and CSV reports.
//
// Provides:
//  - ExperimentConfig and its strict JSON parser (ConfigError on any problem)
//  - run_experiment, returning the report, the CSV table and assertion outcomes
//  - catalog_listing for the `list` command
//
// Configuration keys (all but mesh, space and field are optional):
//   mesh         generator name or path of a JSON mesh file
//   first_level  refinements applied to the mesh before the first level (0)
//   levels       number of levels run (1)
//   space        {"name": "Ned1", "r": 1} or {"family": "P", "r": 1, "k": 1}
//   boundary     boundary selector ("none")
//   weights      "eg" or "clement" ("eg")
//   backend      "taylor" or "l2" ("taylor")
//   field        catalog field name
//   norms        list of norm ids (["L2"])
//   cells        "all" or "boundary_adjacent" ("all")
//   measure      {"stability": bool, "best_approximation": bool, "boundary_tests": int}
//   seed         seed of the randomized boundary test (1)
//   output       {"dir": ".", "report": "report.json", "csv": "errors.csv"}
//   assert       {"slope": {norm: {"expected": x, "tolerance": t}}, "max_slope": {norm: x},
//                 "max_error": {norm: x}, "local_global_ratio": {"min": a, "max": b},
//                 "stability": {"max": x}, "boundary_residual": {"max": x}}

#ifndef FEEC_EXPERIMENT_HPP
#define FEEC_EXPERIMENT_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "feec/analysis.hpp"

namespace feec {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SlopeAssertion {
  double expected = 0.0;
  double tolerance = 0.25;
};

struct Band {
  std::optional<double> min;
  std::optional<double> max;
};

struct ExperimentConfig {
  std::string mesh;
  /// Directory against which a relative mesh path is resolved first.
  std::string base_dir = ".";
  int first_level = 0;
  int levels = 1;
  std::string space_name;
  Family family = Family::Full;
  int r = 1;
  int k = 0;
  std::string boundary = "none";
  WeightKind weights = WeightKind::ErnGuermond;
  Backend backend = Backend::Taylor;
  std::string field;
  std::vector<NormSpec> norms{{0, 2.0}};
  std::string cells = "all";
  bool stability = true;
  bool best_approximation = true;
  int boundary_tests = 10;
  unsigned seed = 1;
  std::string output_dir = ".";
  std::string report_file = "report.json";
  std::string csv_file = "errors.csv";

  std::map<std::string, SlopeAssertion> slope;
  std::map<std::string, double> max_slope;
  std::map<std::string, double> max_error;
  Band local_global_ratio;
  Band stability_band;
  Band boundary_residual;
};

/// Parses and validates; `origin` names the source in diagnostics.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin = "config");
ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentResult {
  nlohmann::json report;
  std::string csv;
  std::vector<std::string> failures;
  /// Human-readable progress and measured constants.
  std::vector<std::string> log;
  bool passed() const { return failures.empty(); }
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Header of the CSV table.
inline constexpr const char* kCsvHeader = "level,h_max,norm,space,weights,backend,value,slope";

/// Sorted listing of mesh generators, named spaces, families, fields,
/// boundary selectors, weights, backends and norms.
std::string catalog_listing();

}  // namespace feec

#endif

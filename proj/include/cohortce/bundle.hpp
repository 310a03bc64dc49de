#pragma once

// Data bundle: a directory of CSV tables plus a scenario file.
//
//   incidence.csv            age_start,age_end,policy_variant,rate
//   stage_dist.csv           age_start,age_end,stage,prob
//   survival.csv             age_start,age_end,stage,t_years,prob_death,prob_bc_given_death
//   population_interval.csv  age_start,age_end,p_die_y0,p_die_y1,p_survive
//   cost_c1.csv, cost_c2.csv, cost_c3.csv   band_start,band_end,stage,euros
//   scenarios.txt            key = value lines, [scenario <id>] sections
//
// policy_variant is one of baseline, older, both. The baseline rows define
// the age grid; older/both rows supply incidence for groups aged 70+ under
// the older-age extensions.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cohortce/scenario.hpp"
#include "cohortce/types.hpp"

namespace cohortce {

struct ScenarioConfig {
  double cohort_size = 100000.0;
  /// Euros per invitee; copied into the bundle's CostModel.
  double screening_unit_cost = 30.0;
  std::string baseline_id;
  std::vector<ScenarioSpec> scenarios;

  const ScenarioSpec* find(std::string_view id) const noexcept;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct DataBundle {
  std::filesystem::path dir;
  ScenarioInputs inputs;
  SurvivalModel survival;
  CostModel costs;
  ScenarioConfig config;

  const AgeGrid& grid() const noexcept { return inputs.baseline.grid; }
};

inline constexpr std::string_view kScenarioFileName = "scenarios.txt";

/// Reads and validates every file. Throws DataError when the directory is
/// absent, otherwise ValidationError listing every missing file, malformed
/// row and broken invariant with file:line context.
DataBundle load_bundle(const std::filesystem::path& dir);

/// Writes a bundle in the format load_bundle reads.
void write_bundle(const DataBundle& bundle, const std::filesystem::path& dir);

/// Parses scenario-file text. `source` names the origin in error messages.
ScenarioConfig parse_scenario_config(std::string_view text, std::string_view source);
std::string serialize_scenario_config(const ScenarioConfig& config);

// ---------------------------------------------------------------------------
// Sensitivity suite file: [sensitivity <id>] sections with `title` and
// `transform = kind,magnitude,scope` lines.

struct SensitivityCase {
  std::string id;
  std::string title;
  std::vector<SensitivityTransform> transforms;

  friend bool operator==(const SensitivityCase&, const SensitivityCase&) = default;
};

struct SensitivitySuite {
  std::vector<SensitivityCase> cases;
  friend bool operator==(const SensitivitySuite&, const SensitivitySuite&) = default;
};

SensitivitySuite parse_sensitivity_suite(std::string_view text, std::string_view source);
SensitivitySuite load_sensitivity_suite(const std::filesystem::path& file);

/// "kind,magnitude,scope" with scope one of modelled, all, or
/// semicolon-separated start-end age ranges.
SensitivityTransform parse_transform(std::string_view text);
std::string format_transform(const SensitivityTransform& t);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

}  // namespace cohortce

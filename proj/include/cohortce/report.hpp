#pragma once

// Scenario runs and the comparison / sensitivity report tables.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohortce/bundle.hpp"
#include "cohortce/mc_oracle.hpp"
#include "cohortce/model.hpp"

namespace cohortce {

/// Builds and evaluates one scenario against a loaded bundle.
ScenarioResult run_scenario(const ScenarioSpec& spec, const DataBundle& bundle);

struct LabeledResult {
  std::string id;
  std::string label;
  ScenarioResult result;
};

std::vector<LabeledResult> run_scenarios(std::span<const ScenarioSpec> specs,
                                         const DataBundle& bundle);

struct ReportRow {
  std::string label;
  double total_cost = 0.0;
  double total_life_years = 0.0;
  std::optional<double> ratio;
  /// Empty on the baseline row.
  std::optional<double> incremental_cost;
  std::optional<IcerResult> icer;
  double bc_deaths = 0.0;
};

struct ReportTable {
  std::string id;
  std::string title;
  std::vector<ReportRow> rows;
};

/// One row per result in input order; incremental columns are relative to
/// the result whose id is baseline_id. Throws DataError for an unknown
/// baseline and DomainError for fewer than two results.
ReportTable emit_comparison(std::span<const LabeledResult> results, std::string_view baseline_id,
                            std::string title = "Comparison of screening policies");

/// One table per suite case; each applies the case's transforms on top of
/// every scenario in the bundle.
std::vector<ReportTable> emit_sensitivity_suite(const SensitivitySuite& suite,
                                                const DataBundle& bundle);

// Rounding: costs to whole euros, life years to 0.1, ratios to 2 decimals,
// ICER to whole euros, deaths to whole persons.
std::string format_cost(double euros);
std::string format_life_years(double years);
std::string format_ratio(double ratio);
std::string format_icer(const IcerResult& r);

std::string render_csv(const ReportTable& table);
std::string render_text(const ReportTable& table);

/// Per-age-group detail of a single run.
std::string render_run_csv(const ScenarioSpec& spec, const ScenarioResult& result,
                           const DataBundle& bundle);
/// Single-row table (no incremental columns) for one run.
ReportTable emit_summary(const LabeledResult& result);

// ---------------------------------------------------------------------------
// Analytic vs microsimulation check.

struct OracleCheck {
  std::string metric;
  double analytic = 0.0;
  double mc_mean = 0.0;
  double mc_standard_error = 0.0;
  bool pass = false;
};

struct OracleReport {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::uint64_t individuals = 0;
  std::vector<OracleCheck> checks;  // life years, total cost, BC deaths

  bool pass() const noexcept;
};

inline constexpr double kOracleStandardErrors = 3.0;

/// Passes when |analytic - mean| <= 3 SE; a zero SE demands agreement to
/// 1e-9 relative.
bool within_standard_errors(double analytic, double mean, double standard_error);

OracleReport validate_scenario(const ScenarioSpec& spec, const DataBundle& bundle,
                               const McConfig& config);

std::string render_oracle_csv(const OracleReport& report);
std::string render_oracle_text(const OracleReport& report);

}  // namespace cohortce

#include "cohortce/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cohortce/error.hpp"
#include "cohortce/numeric.hpp"

namespace cohortce {

namespace {

std::string fixed(double x, int decimals) {
  double r = round_to(x, decimals);
  if (r == 0.0) r = 0.0;  // drop negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
  return buf;
}

const std::vector<std::string>& columns() {
  static const std::vector<std::string> cols{
      "target_age", "total_cost",       "total_life_years", "ratio",
      "incremental_cost", "icer", "icer_note", "bc_deaths"};
  return cols;
}

std::vector<std::string> cells(const ReportRow& row) {
  return {row.label,
          format_cost(row.total_cost),
          format_life_years(row.total_life_years),
          row.ratio ? format_ratio(*row.ratio) : "undefined",
          row.incremental_cost ? format_cost(*row.incremental_cost) : "",
          row.icer ? format_icer(*row.icer) : "",
          row.icer ? icer_note(row.icer->verdict) : "",
          fixed(row.bc_deaths, 0)};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ScenarioResult run_scenario(const ScenarioSpec& spec, const DataBundle& bundle) {
  const BuiltScenario built = build_scenario(spec, bundle.inputs, bundle.costs);
  ScenarioResult r = evaluate_scenario(built.policy, built.epi, bundle.survival, built.costs,
                                       bundle.config.cohort_size);
  r.policy_name = spec.id;
  return r;
}

std::vector<LabeledResult> run_scenarios(std::span<const ScenarioSpec> specs,
                                         const DataBundle& bundle) {
  std::vector<LabeledResult> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) out.push_back({spec.id, spec.label, run_scenario(spec, bundle)});
  return out;
}

ReportTable emit_comparison(std::span<const LabeledResult> results, std::string_view baseline_id,
                            std::string title) {
  if (results.size() < 2) throw DomainError("a comparison needs at least two scenarios");
  const auto base = std::find_if(results.begin(), results.end(),
                                 [&](const LabeledResult& r) { return r.id == baseline_id; });
  if (base == results.end()) {
    throw DataError("baseline scenario '" + std::string(baseline_id) + "' is not among the results");
  }
  ReportTable table;
  table.id = std::string(baseline_id);
  table.title = std::move(title);
  for (const auto& r : results) {
    ReportRow row;
    row.label = r.label;
    row.total_cost = r.result.total_cost;
    row.total_life_years = r.result.total_life_years;
    row.ratio = cost_per_life_year(r.result);
    row.bc_deaths = r.result.bc_deaths;
    if (&r != &*base) {
      row.icer = icer(base->result, r.result);
      row.incremental_cost = row.icer->delta_cost;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<ReportTable> emit_sensitivity_suite(const SensitivitySuite& suite,
                                                const DataBundle& bundle) {
  std::vector<ReportTable> tables;
  for (const auto& c : suite.cases) {
    std::vector<ScenarioSpec> specs = bundle.config.scenarios;
    for (auto& s : specs) {
      s.transforms.insert(s.transforms.end(), c.transforms.begin(), c.transforms.end());
    }
    const auto results = run_scenarios(specs, bundle);
    ReportTable t = emit_comparison(results, bundle.config.baseline_id, c.title);
    t.id = c.id;
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string format_cost(double euros) { return fixed(euros, 0); }
std::string format_life_years(double years) { return fixed(years, 1); }
std::string format_ratio(double ratio) { return fixed(ratio, 2); }

std::string format_icer(const IcerResult& r) {
  if (!r.value) return "undefined";
  return fixed(*r.value, 0);
}

std::string render_csv(const ReportTable& table) {
  std::ostringstream os;
  const auto& cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& row : table.rows) {
    const auto c = cells(row);
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << csv_field(c[i]);
    os << "\n";
  }
  return os.str();
}

std::string render_text(const ReportTable& table) {
  static const std::vector<std::string> headers{
      "Target age", "Total costs", "Life-years", "Ratio",
      "Incremental cost", "ICER", "Note", "BC deaths"};
  std::vector<std::vector<std::string>> grid{headers};
  for (const auto& row : table.rows) grid.push_back(cells(row));
  std::vector<std::size_t> width(headers.size(), 0);
  for (const auto& r : grid) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream os;
  os << table.title << "\n";
  for (std::size_t ri = 0; ri < grid.size(); ++ri) {
    std::string line;
    for (std::size_t i = 0; i < grid[ri].size(); ++i) {
      const std::string& cell = grid[ri][i];
      const std::string pad(width[i] - cell.size(), ' ');
      // Label and note columns are left aligned, numbers right aligned.
      const bool left = i == 0 || i == 6;
      if (i) line += "  ";
      line += left ? cell + pad : pad + cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << "\n";
    if (ri == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      os << std::string(total + 2 * (width.size() - 1), '-') << "\n";
    }
  }
  return os.str();
}

std::string render_run_csv(const ScenarioSpec& spec, const ScenarioResult& result,
                           const DataBundle& bundle) {
  const Policy policy = scenario_policy(spec, bundle.grid());
  std::ostringstream os;
  os << "age_start,age_end,screened,invited,expected_cost\n";
  for (std::size_t j = 0; j < result.trajectory.size(); ++j) {
    os << bundle.grid()[j].start_age << "," << bundle.grid()[j].end_age << ","
       << (policy.screens(j) ? "S" : "NS") << "," << fixed(result.trajectory[j], 3) << ","
       << fixed(result.age_costs[j], 2) << "\n";
  }
  return os.str();
}

ReportTable emit_summary(const LabeledResult& result) {
  ReportTable table;
  table.id = result.id;
  table.title = "Scenario " + result.label;
  ReportRow row;
  row.label = result.label;
  row.total_cost = result.result.total_cost;
  row.total_life_years = result.result.total_life_years;
  row.ratio = cost_per_life_year(result.result);
  row.bc_deaths = result.result.bc_deaths;
  table.rows.push_back(std::move(row));
  return table;
}

// ---------------------------------------------------------------------------

bool OracleReport::pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.pass; });
}

bool within_standard_errors(double analytic, double mean, double standard_error) {
  const double diff = std::fabs(analytic - mean);
  if (standard_error > 0.0) return diff <= kOracleStandardErrors * standard_error;
  return diff <= 1e-9 * std::max(1.0, std::fabs(analytic));
}

OracleReport validate_scenario(const ScenarioSpec& spec, const DataBundle& bundle,
                               const McConfig& config) {
  const BuiltScenario built = build_scenario(spec, bundle.inputs, bundle.costs);
  const double cohort = bundle.config.cohort_size;
  const ScenarioResult analytic =
      evaluate_scenario(built.policy, built.epi, bundle.survival, built.costs, cohort);
  const Microsimulation sim(built.policy, built.epi, bundle.survival, built.costs);
  const McEstimate mc = estimate(config, sim, cohort);

  OracleReport report;
  report.scenario_id = spec.id;
  report.seed = config.seed;
  report.individuals = config.individuals;
  auto add = [&](const char* metric, double a, const McMoment& m) {
    report.checks.push_back({metric, a, m.mean, m.standard_error,
                             within_standard_errors(a, m.mean, m.standard_error)});
  };
  add("life_years", analytic.total_life_years, mc.life_years);
  add("total_cost", analytic.total_cost, mc.cost);
  add("bc_deaths", analytic.bc_deaths, mc.bc_deaths);
  return report;
}

namespace {

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

double z_score(const OracleCheck& c) {
  if (c.mc_standard_error > 0.0) return (c.analytic - c.mc_mean) / c.mc_standard_error;
  return 0.0;
}

}  // namespace

std::string render_oracle_csv(const OracleReport& report) {
  std::ostringstream os;
  os << "scenario,seed,individuals,metric,analytic,mc_mean,mc_se,z,result\n";
  for (const auto& c : report.checks) {
    os << csv_field(report.scenario_id) << "," << report.seed << "," << report.individuals << ","
       << c.metric << "," << sci(c.analytic) << "," << sci(c.mc_mean) << ","
       << sci(c.mc_standard_error) << "," << fixed(z_score(c), 3) << ","
       << (c.pass ? "pass" : "FAIL") << "\n";
  }
  return os.str();
}

std::string render_oracle_text(const OracleReport& report) {
  std::ostringstream os;
  os << "Oracle check for scenario " << report.scenario_id << " (seed " << report.seed << ", "
     << report.individuals << " individuals, tolerance " << fixed(kOracleStandardErrors, 0)
     << " SE)\n";
  for (const auto& c : report.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-11s analytic %18.4f  mc %18.4f  se %14.4f  z %7.3f  %s\n",
                  c.metric.c_str(), c.analytic, c.mc_mean, c.mc_standard_error, z_score(c),
                  c.pass ? "pass" : "FAIL");
    os << line;
  }
  os << (report.pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace cohortce

// cohort-ce: command-line front end for the screening cost-effectiveness
// engine.
//
// Exit codes: 0 success, 2 validation failure (bad data, unknown ids, bad
// flags), 3 computation error (including a failed oracle check).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cohortce/bundle.hpp"
#include "cohortce/error.hpp"
#include "cohortce/report.hpp"

namespace fs = std::filesystem;
using namespace cohortce;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;

struct CommonOptions {
  std::string data_dir;
  std::string out_dir = "out";
  std::string format = "text";
};

void write_output(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

DataBundle load(const CommonOptions& opts) {
  std::string dir = opts.data_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("COHORT_CE_DATA_DIR")) dir = env;
  }
  if (dir.empty()) throw DataError("--data-dir is required (or set COHORT_CE_DATA_DIR)");
  return load_bundle(dir);
}

const ScenarioSpec& require_scenario(const DataBundle& bundle, const std::string& id) {
  if (const ScenarioSpec* spec = bundle.config.find(id)) return *spec;
  throw DataError("unknown scenario id '" + id + "'");
}

std::string render(const ReportTable& table, const std::string& format) {
  return format == "csv" ? render_csv(table) : render_text(table);
}

const char* extension_for(const std::string& format) { return format == "csv" ? ".csv" : ".txt"; }

int cmd_run(const CommonOptions& opts, const std::string& scenario_id) {
  const DataBundle bundle = load(opts);
  const ScenarioSpec& spec = require_scenario(bundle, scenario_id);
  const ScenarioResult result = run_scenario(spec, bundle);
  const fs::path out = opts.out_dir;
  write_output(out / ("run_" + spec.id + "_groups.csv"), render_run_csv(spec, result, bundle));
  const std::string summary = render(emit_summary({spec.id, spec.label, result}), opts.format);
  write_output(out / ("run_" + spec.id + extension_for(opts.format)), summary);
  std::cout << summary;
  return 0;
}

int cmd_compare(const CommonOptions& opts, std::string baseline, std::vector<std::string> alts) {
  const DataBundle bundle = load(opts);
  if (baseline.empty()) baseline = bundle.config.baseline_id;
  if (alts.empty()) {
    for (const auto& s : bundle.config.scenarios) {
      if (s.id != baseline) alts.push_back(s.id);
    }
  }
  std::vector<ScenarioSpec> specs{require_scenario(bundle, baseline)};
  for (const auto& id : alts) specs.push_back(require_scenario(bundle, id));
  const auto results = run_scenarios(specs, bundle);
  const ReportTable table = emit_comparison(results, baseline);
  const std::string text = render(table, opts.format);
  write_output(fs::path(opts.out_dir) / (std::string("comparison") + extension_for(opts.format)),
               text);
  std::cout << text;
  return 0;
}

int cmd_sensitivity(const CommonOptions& opts, const std::string& suite_file) {
  const DataBundle bundle = load(opts);
  const SensitivitySuite suite = load_sensitivity_suite(suite_file);
  const auto tables = emit_sensitivity_suite(suite, bundle);
  for (const auto& t : tables) {
    const std::string text = render(t, opts.format);
    write_output(fs::path(opts.out_dir) / ("sensitivity_" + t.id + extension_for(opts.format)),
                 text);
    std::cout << text << "\n";
  }
  return 0;
}

int cmd_validate(const CommonOptions& opts, const std::string& policy_id, const McConfig& config) {
  const DataBundle bundle = load(opts);
  std::vector<const ScenarioSpec*> specs;
  if (policy_id.empty()) {
    for (const auto& s : bundle.config.scenarios) specs.push_back(&s);
  } else {
    specs.push_back(&require_scenario(bundle, policy_id));
  }
  bool all_pass = true;
  std::string combined;
  for (const ScenarioSpec* spec : specs) {
    const OracleReport report = validate_scenario(*spec, bundle, config);
    all_pass = all_pass && report.pass();
    const std::string text =
        opts.format == "csv" ? render_oracle_csv(report) : render_oracle_text(report);
    write_output(fs::path(opts.out_dir) / ("validate_" + spec->id + extension_for(opts.format)),
                 text);
    std::cout << text;
  }
  return all_pass ? 0 : kExitComputation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cohort cost-effectiveness engine for breast cancer screening policies"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--data-dir", opts.data_dir,
                    "Data bundle directory (falls back to COHORT_CE_DATA_DIR)");
    sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();
  };

  std::string scenario_id;
  auto* run = app.add_subcommand("run", "Evaluate one scenario");
  add_common(run);
  run->add_option("--scenario", scenario_id, "Scenario id from scenarios.txt")->required();

  std::string baseline;
  std::vector<std::string> alts;
  auto* compare = app.add_subcommand("compare", "Compare scenarios against a baseline");
  add_common(compare);
  compare->add_option("--baseline", baseline, "Baseline scenario id (default from scenarios.txt)");
  compare->add_option("--alts", alts, "Alternative scenario ids (default: all others)")
      ->delimiter(',');

  std::string suite_file;
  auto* sensitivity = app.add_subcommand("sensitivity", "Run a one-way sensitivity suite");
  add_common(sensitivity);
  sensitivity->add_option("--suite", suite_file, "Sensitivity suite file")->required();

  std::string policy_id;
  McConfig mc;
  auto* validate =
      app.add_subcommand("validate", "Check analytic results against the microsimulation");
  add_common(validate);
  validate->add_option("--seed", mc.seed, "Random seed")->capture_default_str();
  validate->add_option("--individuals", mc.individuals, "Simulated individuals")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  validate->add_option("--policy", policy_id, "Scenario id (default: every scenario)");
  validate->add_option("--threads", mc.threads, "Worker threads, 0 = all cores")
      ->capture_default_str();
  validate->add_option("--batch-size", mc.batch_size, "Individuals per work item")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return cmd_run(opts, scenario_id);
    if (*compare) return cmd_compare(opts, baseline, alts);
    if (*sensitivity) return cmd_sensitivity(opts, suite_file);
    if (*validate) return cmd_validate(opts, policy_id, mc);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return kExitComputation;
  }
  return 0;
}

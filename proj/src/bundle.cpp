#include "cohortce/bundle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cohortce/error.hpp"

namespace cohortce {

namespace fs = std::filesystem;

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) return out;
    pos = next + 1;
  }
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// Collects problems across all files so the caller sees every one at once.
class Problems {
 public:
  void add(std::string msg) { list_.push_back(std::move(msg)); }
  void at(const std::string& file, std::size_t line, const std::string& msg) {
    add(file + ":" + std::to_string(line) + ": " + msg);
  }
  bool empty() const noexcept { return list_.empty(); }
  std::vector<std::string> take() { return std::move(list_); }

 private:
  std::vector<std::string> list_;
};

struct CsvRow {
  std::size_t line;
  std::vector<std::string_view> fields;
};

// Returns data rows of a CSV file after checking the exact header. The
// returned views point into `storage`.
std::vector<CsvRow> read_csv(const fs::path& path, std::string_view header, std::string& storage,
                             Problems& problems) {
  const std::string name = path.filename().string();
  std::vector<CsvRow> rows;
  if (!fs::exists(path)) {
    problems.add(name + ": missing file");
    return rows;
  }
  storage = read_file(path);
  std::string_view text = storage;
  std::size_t line_no = 0;
  bool seen_header = false;
  const std::size_t columns = split(header, ',').size();
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!seen_header) {
      seen_header = true;
      if (line != header) {
        problems.at(name, line_no, "expected header '" + std::string(header) + "'");
        return {};
      }
      continue;
    }
    auto fields = split(line, ',');
    if (fields.size() != columns) {
      problems.at(name, line_no,
                  "expected " + std::to_string(columns) + " fields, got " +
                      std::to_string(fields.size()));
      continue;
    }
    rows.push_back({line_no, std::move(fields)});
  }
  if (!seen_header) problems.add(name + ": empty file");
  return rows;
}

struct AgeKey {
  int start = 0;
  int end = 0;
};

bool parse_age(const CsvRow& row, const std::string& file, AgeKey& key, Problems& problems) {
  if (!parse_int(row.fields[0], key.start) || !parse_int(row.fields[1], key.end)) {
    problems.at(file, row.line, "malformed age bounds");
    return false;
  }
  return true;
}

std::optional<std::size_t> group_of(const AgeGrid& grid, const AgeKey& key,
                                    const std::string& file, std::size_t line,
                                    Problems& problems) {
  auto j = grid.index_of_start(key.start);
  if (!j || grid[*j].end_age != key.end) {
    problems.at(file, line,
                "age group " + std::to_string(key.start) + "-" + std::to_string(key.end) +
                    " is not in the baseline age grid");
    return std::nullopt;
  }
  return j;
}

std::optional<Stage> parse_stage(std::string_view s, bool allow_no_cancer) {
  int code = 0;
  if (!parse_int(s, code)) return std::nullopt;
  auto k = stage_from_code(code);
  if (!k || (!allow_no_cancer && *k == Stage::NoCancer)) return std::nullopt;
  return k;
}

// ---------------------------------------------------------------------------

struct IncidenceData {
  AgeGrid grid;
  std::vector<double> baseline;
  std::optional<OlderIncidence> older;
  std::optional<OlderIncidence> both;
};

std::optional<IncidenceData> load_incidence(const fs::path& dir, Problems& problems) {
  const std::string file = "incidence.csv";
  std::string storage;
  const auto rows =
      read_csv(dir / file, "age_start,age_end,policy_variant,rate", storage, problems);
  std::map<int, std::pair<int, double>> baseline;
  OlderIncidence older;
  OlderIncidence both;
  for (const auto& row : rows) {
    AgeKey key;
    if (!parse_age(row, file, key, problems)) continue;
    double rate = 0.0;
    if (!parse_number(row.fields[3], rate)) {
      problems.at(file, row.line, "malformed rate");
      continue;
    }
    const std::string_view variant = row.fields[2];
    if (variant == "baseline") {
      if (!baseline.emplace(key.start, std::pair{key.end, rate}).second) {
        problems.at(file, row.line, "duplicate baseline row");
      }
    } else if (variant == "older" || variant == "both") {
      auto& target = variant == "older" ? older : both;
      if (!target.emplace(key.start, rate).second) {
        problems.at(file, row.line, "duplicate " + std::string(variant) + " row");
      }
      if (!(rate >= 0.0 && rate <= 1.0)) problems.at(file, row.line, "rate outside [0, 1]");
    } else {
      problems.at(file, row.line, "unknown policy_variant '" + std::string(variant) + "'");
    }
  }
  if (baseline.empty()) {
    if (!rows.empty()) problems.add(file + ": no baseline rows");
    return std::nullopt;
  }
  std::vector<AgeBand> groups;
  IncidenceData data;
  for (const auto& [start, v] : baseline) {
    groups.push_back({start, v.first});
    data.baseline.push_back(v.second);
  }
  try {
    data.grid = AgeGrid(std::move(groups));
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) problems.add(file + ": " + p);
    return std::nullopt;
  }
  if (!older.empty()) data.older = std::move(older);
  if (!both.empty()) data.both = std::move(both);
  return data;
}

std::vector<StageVector> load_stage_dist(const fs::path& dir, const AgeGrid& grid,
                                         Problems& problems) {
  const std::string file = "stage_dist.csv";
  std::string storage;
  const auto rows = read_csv(dir / file, "age_start,age_end,stage,prob", storage, problems);
  std::vector<StageVector> out(grid.size());
  for (auto& v : out) v.fill(kMissing);
  for (const auto& row : rows) {
    AgeKey key;
    if (!parse_age(row, file, key, problems)) continue;
    auto j = group_of(grid, key, file, row.line, problems);
    auto k = parse_stage(row.fields[2], false);
    double p = 0.0;
    if (!k) problems.at(file, row.line, "stage must be 0..4");
    if (!parse_number(row.fields[3], p)) problems.at(file, row.line, "malformed prob");
    if (!j || !k) continue;
    auto& cell = out[*j][diagnosed_index(*k)];
    if (!std::isnan(cell)) problems.at(file, row.line, "duplicate stage row");
    cell = p;
  }
  for (std::size_t j = 0; j < grid.size() && !rows.empty(); ++j) {
    for (Stage k : kDiagnosedStages) {
      if (std::isnan(out[j][diagnosed_index(k)])) {
        problems.add(file + ": age group " + grid[j].label() + " has no row for stage " +
                     std::to_string(stage_code(k)));
        out[j][diagnosed_index(k)] = 0.0;
      }
    }
  }
  return out;
}

std::optional<SurvivalModel> load_survival(const fs::path& dir, const AgeGrid& grid,
                                           Problems& problems) {
  const std::string surv_file = "survival.csv";
  std::string storage;
  const auto rows = read_csv(dir / surv_file,
                             "age_start,age_end,stage,t_years,prob_death,prob_bc_given_death",
                             storage, problems);
  // (j, state) -> t -> (prob, bc)
  std::vector<std::array<std::map<int, std::pair<double, double>>, kNumStates>> cells(
      grid.size());
  for (const auto& row : rows) {
    AgeKey key;
    if (!parse_age(row, surv_file, key, problems)) continue;
    auto j = group_of(grid, key, surv_file, row.line, problems);
    auto k = parse_stage(row.fields[2], true);
    int t = 0;
    double p = 0.0;
    double bc = 0.0;
    bool ok = j.has_value();
    if (!k) {
      problems.at(surv_file, row.line, "stage must be -1..4");
      ok = false;
    }
    if (!parse_int(row.fields[3], t)) {
      problems.at(surv_file, row.line, "malformed t_years");
      ok = false;
    }
    if (!parse_number(row.fields[4], p) || !parse_number(row.fields[5], bc)) {
      problems.at(surv_file, row.line, "malformed probability");
      ok = false;
    }
    if (!ok) continue;
    if (!cells[*j][state_index(*k)].emplace(t, std::pair{p, bc}).second) {
      problems.at(surv_file, row.line, "duplicate (age group, stage, t) row");
    }
  }

  std::vector<std::array<SurvivalCurve, kNumStates>> curves(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (Stage k : kAllStates) {
      const auto& m = cells[j][state_index(k)];
      if (m.empty()) continue;
      SurvivalCurve c;
      c.first_t = m.begin()->first;
      const int last = m.rbegin()->first;
      c.pmf.assign(static_cast<std::size_t>(last - c.first_t + 1), 0.0);
      c.bc_fraction.assign(c.pmf.size(), 0.0);
      for (const auto& [t, v] : m) {
        c.pmf[static_cast<std::size_t>(t - c.first_t)] = v.first;
        c.bc_fraction[static_cast<std::size_t>(t - c.first_t)] = v.second;
      }
      curves[j][state_index(k)] = std::move(c);
    }
  }

  const std::string pop_file = "population_interval.csv";
  std::string pop_storage;
  const auto pop_rows = read_csv(dir / pop_file, "age_start,age_end,p_die_y0,p_die_y1,p_survive",
                                 pop_storage, problems);
  std::vector<IntervalSplit> interval(grid.size());
  std::vector<bool> seen(grid.size(), false);
  for (const auto& row : pop_rows) {
    AgeKey key;
    if (!parse_age(row, pop_file, key, problems)) continue;
    auto j = group_of(grid, key, pop_file, row.line, problems);
    IntervalSplit s;
    if (!parse_number(row.fields[2], s.p_die_year0) ||
        !parse_number(row.fields[3], s.p_die_year1) || !parse_number(row.fields[4], s.p_survive)) {
      problems.at(pop_file, row.line, "malformed probability");
      continue;
    }
    if (!j) continue;
    if (seen[*j]) problems.at(pop_file, row.line, "duplicate age group row");
    seen[*j] = true;
    interval[*j] = s;
  }
  for (std::size_t j = 0; j < grid.size() && !pop_rows.empty(); ++j) {
    if (!seen[j]) problems.add(pop_file + ": no row for age group " + grid[j].label());
  }

  SurvivalModel model(grid, std::move(curves), std::move(interval));
  try {
    model.validate();
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) problems.add(surv_file + ": " + p);
  }
  return model;
}

std::optional<CostModel> load_costs(const fs::path& dir, Problems& problems) {
  CostModel costs;
  // Band list comes from the union of rows, sorted by start.
  std::map<int, int> band_ends;
  struct Cell {
    int band_start;
    Stage k;
    double euros;
    int which;
  };
  std::vector<Cell> cells;
  const char* files[] = {"cost_c1.csv", "cost_c2.csv", "cost_c3.csv"};
  for (int which = 0; which < 3; ++which) {
    const std::string file = files[which];
    std::string storage;
    const auto rows = read_csv(dir / file, "band_start,band_end,stage,euros", storage, problems);
    std::set<std::pair<int, int>> seen;
    for (const auto& row : rows) {
      AgeKey key;
      if (!parse_age(row, file, key, problems)) continue;
      auto k = parse_stage(row.fields[2], false);
      double euros = 0.0;
      if (!k) {
        problems.at(file, row.line, "stage must be 0..4");
        continue;
      }
      if (!parse_number(row.fields[3], euros)) {
        problems.at(file, row.line, "malformed euros");
        continue;
      }
      if (!seen.emplace(key.start, stage_code(*k)).second) {
        problems.at(file, row.line, "duplicate (band, stage) row");
      }
      auto [it, inserted] = band_ends.emplace(key.start, key.end);
      if (!inserted && it->second != key.end) {
        problems.at(file, row.line, "band starting at " + std::to_string(key.start) +
                                        " has inconsistent end age");
      }
      cells.push_back({key.start, *k, euros, which});
    }
  }
  std::map<int, std::size_t> band_index;
  for (const auto& [start, end] : band_ends) {
    band_index[start] = costs.bands.size();
    costs.bands.push_back({start, end});
  }
  TreatmentCosts missing{kMissing, kMissing, kMissing};
  costs.treatment.assign(costs.bands.size(), {missing, missing, missing, missing, missing});
  for (const auto& c : cells) {
    auto& t = costs.treatment[band_index[c.band_start]][diagnosed_index(c.k)];
    (c.which == 0 ? t.first_year : c.which == 1 ? t.maintenance_year : t.terminal_year) = c.euros;
  }
  return costs;
}

// ---------------------------------------------------------------------------
// key = value files with [kind id] sections.

struct KvLine {
  std::size_t line;
  std::string key;
  std::string value;
};

struct KvSection {
  std::string kind;
  std::string id;
  std::size_t line = 0;
  std::vector<KvLine> entries;
};

std::vector<KvSection> parse_kv(std::string_view text, std::string_view source,
                                Problems& problems) {
  std::vector<KvSection> sections(1);  // sections[0] holds global keys
  std::size_t line_no = 0;
  const std::string src(source);
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.at(src, line_no, "unterminated section header");
        continue;
      }
      const std::string_view inner = trim(line.substr(1, line.size() - 2));
      const auto space = inner.find(' ');
      KvSection s;
      s.kind = std::string(inner.substr(0, space));
      s.id = space == std::string_view::npos ? "" : std::string(trim(inner.substr(space + 1)));
      s.line = line_no;
      if (s.id.empty()) problems.at(src, line_no, "section needs an id");
      sections.push_back(std::move(s));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.at(src, line_no, "expected key = value");
      continue;
    }
    sections.back().entries.push_back(
        {line_no, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))});
  }
  return sections;
}

bool parse_age_range(std::string_view s, AgeBand& out) {
  const auto parts = split(s, '-');
  return parts.size() == 2 && parse_int(parts[0], out.start_age) &&
         parse_int(parts[1], out.end_age) && out.start_age <= out.end_age;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

SensitivityTransform parse_transform(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ValidationError("transform '" + std::string(text) +
                                               "' must be kind,magnitude,scope");
  SensitivityTransform t;
  auto kind = parse_transform_kind(parts[0]);
  if (!kind) throw ValidationError("unknown transform kind '" + std::string(parts[0]) + "'");
  t.kind = *kind;
  if (!parse_number(parts[1], t.magnitude)) {
    throw ValidationError("malformed transform magnitude '" + std::string(parts[1]) + "'");
  }
  if (parts[2] == "modelled") {
    t.scope.kind = AgeScope::Kind::Modelled;
  } else if (parts[2] == "all") {
    t.scope.kind = AgeScope::Kind::All;
  } else {
    t.scope.kind = AgeScope::Kind::Ranges;
    for (auto r : split(parts[2], ';')) {
      AgeBand band;
      if (!parse_age_range(r, band)) {
        throw ValidationError("malformed transform scope '" + std::string(r) + "'");
      }
      t.scope.ranges.push_back(band);
    }
  }
  return t;
}

std::string format_transform(const SensitivityTransform& t) {
  std::string out(transform_kind_name(t.kind));
  out += ",";
  out += format_double(t.magnitude);
  out += ",";
  switch (t.scope.kind) {
    case AgeScope::Kind::Modelled: out += "modelled"; break;
    case AgeScope::Kind::All: out += "all"; break;
    case AgeScope::Kind::Ranges:
      for (std::size_t i = 0; i < t.scope.ranges.size(); ++i) {
        if (i > 0) out += ";";
        out += t.scope.ranges[i].label();
      }
      break;
  }
  return out;
}

const ScenarioSpec* ScenarioConfig::find(std::string_view id) const noexcept {
  for (const auto& s : scenarios) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

ScenarioConfig parse_scenario_config(std::string_view text, std::string_view source) {
  Problems problems;
  const std::string src(source);
  const auto sections = parse_kv(text, source, problems);
  ScenarioConfig config;
  for (const auto& e : sections[0].entries) {
    if (e.key == "cohort_size") {
      if (!parse_number(e.value, config.cohort_size) || !(config.cohort_size > 0.0)) {
        problems.at(src, e.line, "cohort_size must be a positive number");
      }
    } else if (e.key == "screening_unit_cost") {
      if (!parse_number(e.value, config.screening_unit_cost) ||
          !(config.screening_unit_cost >= 0.0)) {
        problems.at(src, e.line, "screening_unit_cost must be a non-negative number");
      }
    } else if (e.key == "baseline") {
      config.baseline_id = e.value;
    } else {
      problems.at(src, e.line, "unknown key '" + e.key + "'");
    }
  }
  for (std::size_t i = 1; i < sections.size(); ++i) {
    const auto& sec = sections[i];
    if (sec.kind != "scenario") {
      problems.at(src, sec.line, "unknown section kind '" + sec.kind + "'");
      continue;
    }
    ScenarioSpec spec;
    spec.id = sec.id;
    spec.label = sec.id;
    for (const auto& e : sec.entries) {
      if (e.key == "label") {
        spec.label = e.value;
      } else if (e.key == "screen") {
        AgeBand range;
        if (!parse_age_range(e.value, range)) {
          problems.at(src, e.line, "screen must be first-last ages");
        } else {
          spec.screen_first_age = range.start_age;
          spec.screen_last_age = range.end_age;
        }
      } else if (e.key == "extension") {
        if (auto ext = parse_extension(e.value)) {
          spec.extension = *ext;
        } else {
          problems.at(src, e.line, "extension must be none, younger, older or both");
        }
      } else if (e.key == "transform") {
        try {
          spec.transforms.push_back(parse_transform(e.value));
        } catch (const ValidationError& err) {
          problems.at(src, e.line, err.problems().front());
        }
      } else {
        problems.at(src, e.line, "unknown key '" + e.key + "'");
      }
    }
    if (config.find(spec.id) != nullptr) {
      problems.at(src, sec.line, "duplicate scenario id '" + spec.id + "'");
    }
    config.scenarios.push_back(std::move(spec));
  }
  if (config.scenarios.empty()) problems.add(src + ": no scenarios defined");
  if (config.baseline_id.empty() && !config.scenarios.empty()) {
    config.baseline_id = config.scenarios.front().id;
  }
  if (!config.baseline_id.empty() && !config.scenarios.empty() &&
      config.find(config.baseline_id) == nullptr) {
    problems.add(src + ": baseline '" + config.baseline_id + "' is not a defined scenario");
  }
  if (!problems.empty()) throw ValidationError(problems.take());
  return config;
}

std::string serialize_scenario_config(const ScenarioConfig& config) {
  std::ostringstream os;
  os << "cohort_size = " << format_double(config.cohort_size) << "\n";
  os << "screening_unit_cost = " << format_double(config.screening_unit_cost) << "\n";
  os << "baseline = " << config.baseline_id << "\n";
  for (const auto& s : config.scenarios) {
    os << "\n[scenario " << s.id << "]\n";
    os << "label = " << s.label << "\n";
    os << "screen = " << s.screen_first_age << "-" << s.screen_last_age << "\n";
    os << "extension = " << extension_name(s.extension) << "\n";
    for (const auto& t : s.transforms) os << "transform = " << format_transform(t) << "\n";
  }
  return os.str();
}

SensitivitySuite parse_sensitivity_suite(std::string_view text, std::string_view source) {
  Problems problems;
  const std::string src(source);
  const auto sections = parse_kv(text, source, problems);
  for (const auto& e : sections[0].entries) {
    problems.at(src, e.line, "key outside a [sensitivity] section");
  }
  SensitivitySuite suite;
  for (std::size_t i = 1; i < sections.size(); ++i) {
    const auto& sec = sections[i];
    if (sec.kind != "sensitivity") {
      problems.at(src, sec.line, "unknown section kind '" + sec.kind + "'");
      continue;
    }
    SensitivityCase c;
    c.id = sec.id;
    c.title = sec.id;
    for (const auto& e : sec.entries) {
      if (e.key == "title") {
        c.title = e.value;
      } else if (e.key == "transform") {
        try {
          c.transforms.push_back(parse_transform(e.value));
        } catch (const ValidationError& err) {
          problems.at(src, e.line, err.problems().front());
        }
      } else {
        problems.at(src, e.line, "unknown key '" + e.key + "'");
      }
    }
    suite.cases.push_back(std::move(c));
  }
  if (!problems.empty()) throw ValidationError(problems.take());
  return suite;
}

SensitivitySuite load_sensitivity_suite(const fs::path& file) {
  if (!fs::exists(file)) throw DataError("suite file " + file.string() + " does not exist");
  return parse_sensitivity_suite(read_file(file), file.filename().string());
}

// ---------------------------------------------------------------------------

DataBundle load_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("data directory " + dir.string() + " does not exist");
  Problems problems;
  DataBundle bundle;
  bundle.dir = dir;

  const fs::path scenario_path = dir / kScenarioFileName;
  if (!fs::exists(scenario_path)) {
    problems.add(std::string(kScenarioFileName) + ": missing file");
  } else {
    try {
      bundle.config = parse_scenario_config(read_file(scenario_path), kScenarioFileName);
    } catch (const ValidationError& e) {
      for (const auto& p : e.problems()) problems.add(p);
    }
  }

  auto incidence = load_incidence(dir, problems);
  if (!incidence) {
    // Without a grid nothing else can be resolved; still report file presence.
    for (const char* f : {"stage_dist.csv", "survival.csv", "population_interval.csv",
                          "cost_c1.csv", "cost_c2.csv", "cost_c3.csv"}) {
      if (!fs::exists(dir / f)) problems.add(std::string(f) + ": missing file");
    }
    throw ValidationError(problems.take());
  }
  const AgeGrid& grid = incidence->grid;

  const auto stages = load_stage_dist(dir, grid, problems);
  EpidemiologyTable epi{grid, {}};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    epi.rows.push_back({incidence->baseline[j], stages[j], 0.0});
  }
  try {
    epi.validate();
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) problems.add("stage_dist.csv/incidence.csv: " + p);
  }
  bundle.inputs.baseline = std::move(epi);
  bundle.inputs.older_incidence = incidence->older;
  bundle.inputs.both_older_incidence = incidence->both;

  if (auto surv = load_survival(dir, grid, problems)) bundle.survival = std::move(*surv);
  if (auto costs = load_costs(dir, problems)) {
    bundle.costs = std::move(*costs);
    bundle.costs.screening_unit_cost = bundle.config.screening_unit_cost;
    try {
      bundle.costs.validate(grid);
    } catch (const ValidationError& e) {
      for (const auto& p : e.problems()) problems.add("cost tables: " + p);
    }
  }

  if (!problems.empty()) throw ValidationError(problems.take());
  return bundle;
}

void write_bundle(const DataBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  const AgeGrid& grid = bundle.grid();
  const auto& base = bundle.inputs.baseline;

  std::ostringstream inc;
  inc << "age_start,age_end,policy_variant,rate\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    inc << grid[j].start_age << "," << grid[j].end_age << ",baseline,"
        << format_double(base.rows[j].incidence) << "\n";
  }
  auto variant = [&](const std::optional<OlderIncidence>& v, const char* name) {
    if (!v) return;
    for (const auto& [start, rate] : *v) {
      inc << start << "," << start + kIntervalYears - 1 << "," << name << ","
          << format_double(rate) << "\n";
    }
  };
  variant(bundle.inputs.older_incidence, "older");
  variant(bundle.inputs.both_older_incidence, "both");
  write_file(dir / "incidence.csv", inc.str());

  std::ostringstream st;
  st << "age_start,age_end,stage,prob\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const StageVector s = base.rows[j].effective_cond_stage();
    for (Stage k : kDiagnosedStages) {
      st << grid[j].start_age << "," << grid[j].end_age << "," << stage_code(k) << ","
         << format_double(s[diagnosed_index(k)]) << "\n";
    }
  }
  write_file(dir / "stage_dist.csv", st.str());

  std::ostringstream sv;
  sv << "age_start,age_end,stage,t_years,prob_death,prob_bc_given_death\n";
  std::ostringstream pop;
  pop << "age_start,age_end,p_die_y0,p_die_y1,p_survive\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (Stage k : kAllStates) {
      const SurvivalCurve& c = bundle.survival.curve(j, k);
      for (int t = c.first_t; t <= c.last_t(); ++t) {
        sv << grid[j].start_age << "," << grid[j].end_age << "," << stage_code(k) << "," << t
           << "," << format_double(c.lambda(t)) << "," << format_double(c.bc_share(t)) << "\n";
      }
    }
    const IntervalSplit& s = bundle.survival.interval(j);
    pop << grid[j].start_age << "," << grid[j].end_age << "," << format_double(s.p_die_year0)
        << "," << format_double(s.p_die_year1) << "," << format_double(s.p_survive) << "\n";
  }
  write_file(dir / "survival.csv", sv.str());
  write_file(dir / "population_interval.csv", pop.str());

  const char* files[] = {"cost_c1.csv", "cost_c2.csv", "cost_c3.csv"};
  for (int which = 0; which < 3; ++which) {
    std::ostringstream os;
    os << "band_start,band_end,stage,euros\n";
    for (std::size_t b = 0; b < bundle.costs.bands.size(); ++b) {
      for (Stage k : kDiagnosedStages) {
        const TreatmentCosts& c = bundle.costs.costs(b, k);
        const double v = which == 0 ? c.first_year : which == 1 ? c.maintenance_year
                                                                : c.terminal_year;
        os << bundle.costs.bands[b].start_age << "," << bundle.costs.bands[b].end_age << ","
           << stage_code(k) << "," << format_double(v) << "\n";
      }
    }
    write_file(dir / files[which], os.str());
  }

  ScenarioConfig config = bundle.config;
  config.screening_unit_cost = bundle.costs.screening_unit_cost;
  write_file(dir / kScenarioFileName, serialize_scenario_config(config));
}

}  // namespace cohortce

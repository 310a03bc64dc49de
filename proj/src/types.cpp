#include "cohortce/types.hpp"

#include <cmath>
#include <sstream>

#include "cohortce/error.hpp"
#include "cohortce/numeric.hpp"

namespace cohortce {

namespace {

constexpr double kProbabilitySumTolerance = 1e-9;
constexpr double kPmfSumTolerance = 1e-6;

std::string group_name(const AgeGrid& grid, std::size_t j) {
  return "age group " + grid[j].label();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << problems.size() << " validation problem(s)";
        for (const auto& p : problems) os << "\n  " << p;
        return os.str();
      }()),
      problems_(std::move(problems)) {}

ValidationError::ValidationError(std::string problem)
    : ValidationError(std::vector<std::string>{std::move(problem)}) {}

std::optional<Stage> stage_from_code(int code) noexcept {
  if (code < -1 || code > 4) return std::nullopt;
  return static_cast<Stage>(code);
}

std::string_view stage_label(Stage k) noexcept {
  switch (k) {
    case Stage::NoCancer: return "NoCancer";
    case Stage::Unknown: return "Unknown";
    case Stage::Localized: return "Localized";
    case Stage::Regional: return "Regional";
    case Stage::Distant: return "Distant";
    case Stage::InSitu: return "InSitu";
  }
  return "?";
}

std::string AgeBand::label() const {
  return std::to_string(start_age) + "-" + std::to_string(end_age);
}

// ---------------------------------------------------------------------------

AgeGrid::AgeGrid(std::vector<AgeBand> groups) : groups_(std::move(groups)) {
  std::vector<std::string> problems;
  if (groups_.empty()) problems.emplace_back("age grid is empty");
  for (std::size_t j = 0; j < groups_.size(); ++j) {
    const auto& g = groups_[j];
    if (g.end_age - g.start_age + 1 != kIntervalYears) {
      problems.push_back("age group " + g.label() + " does not span exactly 2 years");
    }
    if (g.end_age >= kHorizonAge) {
      problems.push_back("age group " + g.label() + " reaches past the age-100 horizon");
    }
    if (j > 0 && g.start_age != groups_[j - 1].end_age + 1) {
      problems.push_back("age group " + g.label() + " is not contiguous with " +
                         groups_[j - 1].label());
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

AgeGrid AgeGrid::standard() { return from_first_age(46, 27); }

AgeGrid AgeGrid::from_first_age(int first_age, std::size_t count) {
  std::vector<AgeBand> groups;
  groups.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const int start = first_age + kIntervalYears * static_cast<int>(j);
    groups.push_back({start, start + kIntervalYears - 1});
  }
  return AgeGrid(std::move(groups));
}

std::optional<std::size_t> AgeGrid::index_of_start(int start_age) const noexcept {
  for (std::size_t j = 0; j < groups_.size(); ++j) {
    if (groups_[j].start_age == start_age) return j;
  }
  return std::nullopt;
}

std::size_t AgeGrid::require_index_of_start(int start_age) const {
  if (auto j = index_of_start(start_age)) return *j;
  throw DataError("no age group starting at " + std::to_string(start_age));
}

Policy make_policy(std::string name, const AgeGrid& grid, int first_age, int last_age) {
  Policy p{std::move(name), {}};
  p.h.reserve(grid.size());
  for (const auto& g : grid.groups()) {
    const bool in = g.start_age >= first_age && g.start_age <= last_age;
    p.h.push_back(in ? ScreeningChoice::Screen : ScreeningChoice::NoScreen);
  }
  return p;
}

// ---------------------------------------------------------------------------

StageVector EpidemiologyRow::effective_cond_stage() const noexcept {
  StageVector s = cond_stage;
  s[diagnosed_index(Stage::Localized)] += localized_shift;
  s[diagnosed_index(Stage::Regional)] -= localized_shift;
  return s;
}

void EpidemiologyTable::validate() const {
  std::vector<std::string> problems;
  if (rows.size() != grid.size()) {
    problems.push_back("epidemiology table has " + std::to_string(rows.size()) +
                       " rows for " + std::to_string(grid.size()) + " age groups");
    throw ValidationError(std::move(problems));
  }
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& r = rows[j];
    if (!(r.incidence >= 0.0 && r.incidence <= 1.0)) {
      std::ostringstream os;
      os << group_name(grid, j) << ": incidence " << r.incidence << " outside [0, 1]";
      problems.push_back(os.str());
    }
    const StageVector s = r.effective_cond_stage();
    CompensatedSum total;
    bool negative = false;
    for (double p : s) {
      negative = negative || !(p >= 0.0);
      total += p;
    }
    if (negative) {
      problems.push_back(group_name(grid, j) + ": negative conditional stage probability");
    }
    if (std::fabs(total.value() - 1.0) > kProbabilitySumTolerance) {
      std::ostringstream os;
      os.precision(12);
      os << group_name(grid, j) << ": conditional stage distribution sums to "
         << total.value();
      problems.push_back(os.str());
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

void StageDistribution::validate() const {
  std::vector<std::string> problems;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    CompensatedSum total;
    for (double p : mu[j]) {
      if (!(p >= 0.0)) problems.push_back("mu row " + std::to_string(j) + " has a negative entry");
      total += p;
    }
    if (std::fabs(total.value() - 1.0) > kProbabilitySumTolerance) {
      problems.push_back("mu row " + std::to_string(j) + " does not sum to 1");
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// ---------------------------------------------------------------------------

double SurvivalCurve::lambda(int t) const noexcept {
  if (t < first_t || t > last_t()) return 0.0;
  return pmf[static_cast<std::size_t>(t - first_t)];
}

double SurvivalCurve::bc_share(int t) const noexcept {
  if (t < first_t || t > last_t()) return 0.0;
  return bc_fraction[static_cast<std::size_t>(t - first_t)];
}

double SurvivalCurve::total_mass() const noexcept { return compensated_sum(pmf); }

double SurvivalCurve::expected_years() const noexcept {
  CompensatedSum acc;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += static_cast<double>(first_t + static_cast<int>(i)) * pmf[i];
  }
  return acc.value();
}

SurvivalModel::SurvivalModel(AgeGrid grid,
                             std::vector<std::array<SurvivalCurve, kNumStates>> curves,
                             std::vector<IntervalSplit> interval)
    : grid_(std::move(grid)), curves_(std::move(curves)), interval_(std::move(interval)) {}

const SurvivalCurve& SurvivalModel::curve(std::size_t j, Stage k) const {
  if (j >= curves_.size()) {
    throw DataError("survival model has no age group index " + std::to_string(j));
  }
  const auto& c = curves_[j][state_index(k)];
  if (c.pmf.empty()) {
    throw DataError("survival model has no curve for " + group_name(grid_, j) + ", stage " +
                    std::to_string(stage_code(k)));
  }
  return c;
}

const IntervalSplit& SurvivalModel::interval(std::size_t j) const {
  if (j >= interval_.size()) {
    throw DataError("survival model has no interval split for index " + std::to_string(j));
  }
  return interval_[j];
}

void SurvivalModel::validate() const {
  std::vector<std::string> problems;
  if (curves_.size() != grid_.size() || interval_.size() != grid_.size()) {
    throw ValidationError("survival model dimensions do not match the age grid");
  }
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    const int horizon = grid_.years_to_horizon(j);
    for (Stage k : kAllStates) {
      const auto& c = curves_[j][state_index(k)];
      const std::string where =
          group_name(grid_, j) + ", stage " + std::to_string(stage_code(k));
      if (c.pmf.empty()) {
        problems.push_back(where + ": missing survival curve");
        continue;
      }
      if (c.bc_fraction.size() != c.pmf.size()) {
        problems.push_back(where + ": cause split length differs from pmf length");
        continue;
      }
      // Undiagnosed deaths can fall in year 0 of the interval; diagnosed
      // survival counts the diagnosis year as year 1.
      const int min_t = (k == Stage::NoCancer) ? 0 : 1;
      const int max_t = (k == Stage::NoCancer) ? horizon - 1 : horizon;
      if (c.first_t < min_t || c.last_t() > max_t) {
        std::ostringstream os;
        os << where << ": support [" << c.first_t << ", " << c.last_t() << "] outside ["
           << min_t << ", " << max_t << "]";
        problems.push_back(os.str());
      }
      bool bad_entry = false;
      for (std::size_t i = 0; i < c.pmf.size(); ++i) {
        bad_entry = bad_entry || !(c.pmf[i] >= 0.0) || !(c.bc_fraction[i] >= 0.0) ||
                    !(c.bc_fraction[i] <= 1.0);
        if (k == Stage::NoCancer && c.bc_fraction[i] != 0.0) bad_entry = true;
      }
      if (bad_entry) {
        problems.push_back(where +
                           ": negative probability or cause split outside [0, 1] "
                           "(undiagnosed split must be 0)");
      }
      const double mass = c.total_mass();
      if (std::fabs(mass - 1.0) > kPmfSumTolerance) {
        std::ostringstream os;
        os.precision(10);
        os << where << ": time-to-death pmf has mass " << mass;
        problems.push_back(os.str());
      }
    }

    const auto& s = interval_[j];
    const std::string where = group_name(grid_, j) + " interval split";
    if (!(s.p_die_year0 >= 0.0) || !(s.p_die_year1 >= 0.0) || !(s.p_survive >= 0.0)) {
      problems.push_back(where + ": negative probability");
    }
    if (std::fabs(s.p_die_year0 + s.p_die_year1 + s.p_survive - 1.0) >
        kProbabilitySumTolerance) {
      problems.push_back(where + ": probabilities do not sum to 1");
    }
    const auto& undiagnosed = curves_[j][state_index(Stage::NoCancer)];
    if (!undiagnosed.pmf.empty()) {
      CompensatedSum later;
      for (int t = 2; t <= undiagnosed.last_t(); ++t) later += undiagnosed.lambda(t);
      if (std::fabs(undiagnosed.lambda(0) - s.p_die_year0) > kPmfSumTolerance ||
          std::fabs(undiagnosed.lambda(1) - s.p_die_year1) > kPmfSumTolerance ||
          std::fabs(later.value() - s.p_survive) > kPmfSumTolerance) {
        problems.push_back(where + ": inconsistent with the stage -1 time-to-death pmf");
      }
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// ---------------------------------------------------------------------------

std::vector<AgeBand> standard_cost_bands() {
  return {{46, 49}, {50, 54}, {55, 59}, {60, 64}, {65, 69}, {70, 74}, {75, kHorizonAge - 1}};
}

std::size_t CostModel::band_index_for_age(int age) const {
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (bands[b].contains(age)) return b;
  }
  throw DataError("no cost band covers age " + std::to_string(age));
}

const TreatmentCosts& CostModel::costs(std::size_t band, Stage k) const {
  if (k == Stage::NoCancer) throw DomainError("stage -1 carries no treatment cost");
  if (band >= treatment.size()) throw DataError("cost band index out of range");
  return treatment[band][diagnosed_index(k)];
}

void CostModel::validate(const AgeGrid& grid) const {
  std::vector<std::string> problems;
  if (!(screening_unit_cost >= 0.0)) problems.emplace_back("negative screening unit cost");
  if (treatment.size() != bands.size()) {
    problems.emplace_back("cost table rows do not match cost bands");
  }
  for (std::size_t b = 0; b < bands.size() && b < treatment.size(); ++b) {
    for (Stage k : kDiagnosedStages) {
      const auto& c = treatment[b][diagnosed_index(k)];
      if (!(c.first_year >= 0.0) || !(c.maintenance_year >= 0.0) || !(c.terminal_year >= 0.0)) {
        problems.push_back("cost band " + bands[b].label() + ", stage " +
                           std::to_string(stage_code(k)) + ": negative or missing cost");
      }
    }
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    int covering = 0;
    for (const auto& band : bands) covering += band.contains(grid[j].start_age) ? 1 : 0;
    if (covering != 1) {
      problems.push_back(group_name(grid, j) + " maps to " + std::to_string(covering) +
                         " cost bands");
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

}  // namespace cohortce

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cohortce {

/// Nobody in the model survives past this age.
inline constexpr int kHorizonAge = 100;

/// Width of one screening interval / age group, in years.
inline constexpr int kIntervalYears = 2;

// ---------------------------------------------------------------------------
// Stages

/// Observed state at a screening round. NoCancer is never a diagnosed stage.
enum class Stage : int {
  NoCancer = -1,
  Unknown = 0,
  Localized = 1,
  Regional = 2,
  Distant = 3,
  InSitu = 4,
};

inline constexpr std::size_t kNumDiagnosedStages = 5;
inline constexpr std::size_t kNumStates = kNumDiagnosedStages + 1;

inline constexpr std::array<Stage, kNumDiagnosedStages> kDiagnosedStages{
    Stage::Unknown, Stage::Localized, Stage::Regional, Stage::Distant, Stage::InSitu};

inline constexpr std::array<Stage, kNumStates> kAllStates{
    Stage::NoCancer, Stage::Unknown,  Stage::Localized,
    Stage::Regional, Stage::Distant, Stage::InSitu};

constexpr int stage_code(Stage k) noexcept { return static_cast<int>(k); }

/// Position of a diagnosed stage in per-stage arrays (Unknown -> 0).
constexpr std::size_t diagnosed_index(Stage k) noexcept {
  return static_cast<std::size_t>(stage_code(k));
}

/// Position of any state in arrays that include NoCancer first.
constexpr std::size_t state_index(Stage k) noexcept {
  return static_cast<std::size_t>(stage_code(k) + 1);
}

std::optional<Stage> stage_from_code(int code) noexcept;
std::string_view stage_label(Stage k) noexcept;

enum class DeathCause { BreastCancer, OtherCause };

// ---------------------------------------------------------------------------
// Age grid

/// Closed age interval [start_age, end_age] in whole years.
struct AgeBand {
  int start_age = 0;
  int end_age = 0;

  bool contains(int age) const noexcept { return age >= start_age && age <= end_age; }
  std::string label() const;
  friend bool operator==(const AgeBand&, const AgeBand&) = default;
};

/// Contiguous sequence of 2-year age groups, one per screening round.
class AgeGrid {
 public:
  AgeGrid() = default;
  /// Throws ValidationError unless bands are contiguous 2-year groups ending
  /// before the horizon.
  explicit AgeGrid(std::vector<AgeBand> groups);

  /// 46-47 through 98-99 (27 groups).
  static AgeGrid standard();
  /// Consecutive 2-year groups starting at first_age.
  static AgeGrid from_first_age(int first_age, std::size_t count);

  std::size_t size() const noexcept { return groups_.size(); }
  const AgeBand& operator[](std::size_t j) const { return groups_[j]; }
  const std::vector<AgeBand>& groups() const noexcept { return groups_; }
  std::optional<std::size_t> index_of_start(int start_age) const noexcept;
  std::size_t require_index_of_start(int start_age) const;

  /// Years from the start of group j to the horizon.
  int years_to_horizon(std::size_t j) const noexcept {
    return kHorizonAge - groups_[j].start_age;
  }

  friend bool operator==(const AgeGrid&, const AgeGrid&) = default;

 private:
  std::vector<AgeBand> groups_;
};

// ---------------------------------------------------------------------------
// Policy

enum class ScreeningChoice { Screen, NoScreen };

struct Policy {
  std::string name;
  std::vector<ScreeningChoice> h;

  bool screens(std::size_t j) const { return h.at(j) == ScreeningChoice::Screen; }
  friend bool operator==(const Policy&, const Policy&) = default;
};

/// Screens every group whose start age lies in [first_age, last_age].
Policy make_policy(std::string name, const AgeGrid& grid, int first_age, int last_age);

// ---------------------------------------------------------------------------
// Epidemiology

using StageVector = std::array<double, kNumDiagnosedStages>;

struct EpidemiologyRow {
  /// Probability of a first diagnosis within the 2-year interval.
  double incidence = 0.0;
  /// Conditional stage distribution given diagnosis, before any shift.
  StageVector cond_stage{};
  /// Probability moved from Regional to Localized by sensitivity shifts.
  /// Kept apart from cond_stage so that a shift and its negation cancel
  /// exactly.
  double localized_shift = 0.0;

  StageVector effective_cond_stage() const noexcept;
  friend bool operator==(const EpidemiologyRow&, const EpidemiologyRow&) = default;
};

struct EpidemiologyTable {
  AgeGrid grid;
  std::vector<EpidemiologyRow> rows;

  const EpidemiologyRow& row(std::size_t j) const { return rows.at(j); }
  EpidemiologyRow& row(std::size_t j) { return rows.at(j); }

  /// Throws ValidationError listing every offending age group.
  void validate() const;
  friend bool operator==(const EpidemiologyTable&, const EpidemiologyTable&) = default;
};

/// mu_j(k) = P(X_j = k) over all six states, NoCancer first.
struct StageDistribution {
  std::vector<std::array<double, kNumStates>> mu;

  std::size_t size() const noexcept { return mu.size(); }
  double at(std::size_t j, Stage k) const { return mu.at(j)[state_index(k)]; }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Survival

/// Time-to-death PMF over integer years t = first_t .. first_t + size - 1,
/// with the probability that a death at t is due to breast cancer.
struct SurvivalCurve {
  int first_t = 1;
  std::vector<double> pmf;
  std::vector<double> bc_fraction;

  int last_t() const noexcept { return first_t + static_cast<int>(pmf.size()) - 1; }
  double lambda(int t) const noexcept;
  double bc_share(int t) const noexcept;
  double total_mass() const noexcept;
  double expected_years() const noexcept;
  friend bool operator==(const SurvivalCurve&, const SurvivalCurve&) = default;
};

/// Outcome of the 2-year interval for someone not diagnosed at the round.
struct IntervalSplit {
  double p_die_year0 = 0.0;
  double p_die_year1 = 0.0;
  double p_survive = 1.0;
  friend bool operator==(const IntervalSplit&, const IntervalSplit&) = default;
};

class SurvivalModel {
 public:
  SurvivalModel() = default;
  SurvivalModel(AgeGrid grid, std::vector<std::array<SurvivalCurve, kNumStates>> curves,
                std::vector<IntervalSplit> interval);

  const AgeGrid& grid() const noexcept { return grid_; }
  /// Throws DataError when (j, k) is absent.
  const SurvivalCurve& curve(std::size_t j, Stage k) const;
  const IntervalSplit& interval(std::size_t j) const;

  void validate() const;
  friend bool operator==(const SurvivalModel&, const SurvivalModel&) = default;

 private:
  AgeGrid grid_;
  std::vector<std::array<SurvivalCurve, kNumStates>> curves_;
  std::vector<IntervalSplit> interval_;
};

// ---------------------------------------------------------------------------
// Costs

/// Euros: first year after diagnosis, each of years 2-5, last year before a
/// breast cancer death.
struct TreatmentCosts {
  double first_year = 0.0;
  double maintenance_year = 0.0;
  double terminal_year = 0.0;
  friend bool operator==(const TreatmentCosts&, const TreatmentCosts&) = default;
};

struct CostModel {
  /// Euros per invitee in a screened group.
  double screening_unit_cost = 0.0;
  /// Bands keyed by age at diagnosis.
  std::vector<AgeBand> bands;
  std::vector<std::array<TreatmentCosts, kNumDiagnosedStages>> treatment;

  std::size_t band_index_for_age(int age) const;
  const TreatmentCosts& costs(std::size_t band, Stage k) const;
  double screening_cost(ScreeningChoice choice) const noexcept {
    return choice == ScreeningChoice::Screen ? screening_unit_cost : 0.0;
  }

  /// Checks non-negativity and that every group of grid maps to one band.
  void validate(const AgeGrid& grid) const;
  friend bool operator==(const CostModel&, const CostModel&) = default;
};

/// Cost bands of the Finnish treatment cost tables.
std::vector<AgeBand> standard_cost_bands();

// ---------------------------------------------------------------------------
// Results

struct ScenarioResult {
  std::string policy_name;
  std::vector<double> trajectory;
  std::vector<double> age_costs;
  double total_life_years = 0.0;
  double total_cost = 0.0;
  double bc_deaths = 0.0;
  std::optional<double> cost_per_life_year;
};

}  // namespace cohortce

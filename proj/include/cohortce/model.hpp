#pragma once

// Closed-form cohort model: stage distributions, cohort dynamics, expected
// remaining life years, expected costs, breast cancer deaths and the ratios
// derived from them.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cohortce/types.hpp"

namespace cohortce {

inline constexpr double kDefaultCohortSize = 100000.0;

/// mu_j(k) = cond_stage_j(k) * incidence_j, mu_j(-1) = 1 - incidence_j.
StageDistribution build_mu(const EpidemiologyTable& epi);

/// One cell of the joint (time-to-death, cause) distribution.
struct JointCell {
  int t = 0;
  double bc = 0.0;     // pi(t, BreastCancer)
  double other = 0.0;  // pi(t, OtherCause)
};

/// pi_{j,k}(t, d), ascending in t. k must be a diagnosed stage.
std::vector<JointCell> build_pi(const SurvivalModel& surv, std::size_t j, Stage k);

/// P(T_j = t) for t = 0 .. years_to_horizon(j), index == t.
std::vector<double> death_time_distribution(std::size_t j, const StageDistribution& mu,
                                            const SurvivalModel& surv);

/// Removal probabilities for one round, split as in the population recursion.
struct RoundRemoval {
  double interval_death = 0.0;       // dies within the 2-year interval
  double survive_diagnosed = 0.0;    // lives >= 2 years but was diagnosed
};

RoundRemoval round_removal(std::size_t j, const StageDistribution& mu,
                           const SurvivalModel& surv);

/// N_1 .. N_J with N_1 = cohort_size. Fractional persons are kept.
std::vector<double> cohort_trajectory(const StageDistribution& mu, const SurvivalModel& surv,
                                      double cohort_size = kDefaultCohortSize);

double expected_life_years(const StageDistribution& mu, const SurvivalModel& surv,
                           std::span<const double> trajectory);

/// Treatment cost of one case that lives n >= 1 years after diagnosis.
double per_case_cost(const TreatmentCosts& c, int n, DeathCause cause);
double per_case_cost(const CostModel& costs, std::size_t band, Stage k, int n,
                     DeathCause cause);

/// Expected per-case treatment cost for a diagnosis in group j at stage k.
double expected_case_cost(std::size_t j, Stage k, const SurvivalModel& surv,
                          const CostModel& costs);

double expected_costs_age(std::size_t j, const Policy& policy, const StageDistribution& mu,
                          const SurvivalModel& surv, const CostModel& costs,
                          std::span<const double> trajectory);

double expected_costs_total(std::span<const double> age_costs);

double expected_bc_deaths(const StageDistribution& mu, const SurvivalModel& surv,
                          std::span<const double> trajectory);

/// Runs the whole model for one policy.
ScenarioResult evaluate_scenario(const Policy& policy, const EpidemiologyTable& epi,
                                 const SurvivalModel& surv, const CostModel& costs,
                                 double cohort_size = kDefaultCohortSize);

// ---------------------------------------------------------------------------

enum class IcerVerdict {
  Ratio,       // ordinary positive ratio
  Dominant,    // cheaper and more life years
  Dominated,   // dearer and fewer life years
  Undefined,   // no life-year difference
};

struct IcerResult {
  double delta_cost = 0.0;
  double delta_life_years = 0.0;
  std::optional<double> value;
  IcerVerdict verdict = IcerVerdict::Undefined;
};

inline constexpr double kIcerMinLifeYearDifference = 1e-9;

IcerResult icer(double baseline_cost, double baseline_life_years, double alternative_cost,
                double alternative_life_years);
IcerResult icer(const ScenarioResult& baseline, const ScenarioResult& alternative);

std::string icer_note(IcerVerdict verdict);

std::optional<double> cost_per_life_year(double total_cost, double total_life_years);
std::optional<double> cost_per_life_year(const ScenarioResult& result);

}  // namespace cohortce

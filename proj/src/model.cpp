#include "cohortce/model.hpp"

#include <algorithm>
#include <cmath>

#include "cohortce/error.hpp"
#include "cohortce/numeric.hpp"

namespace cohortce {

namespace {

// Maintenance costs accrue for at most years 2-5 after diagnosis.
constexpr int kMaintenanceYears = 4;

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ValidationError(std::string("dimension mismatch: ") + what);
}

}  // namespace

StageDistribution build_mu(const EpidemiologyTable& epi) {
  epi.validate();
  StageDistribution out;
  out.mu.reserve(epi.rows.size());
  for (const auto& r : epi.rows) {
    std::array<double, kNumStates> m{};
    m[state_index(Stage::NoCancer)] = 1.0 - r.incidence;
    const StageVector cond = r.effective_cond_stage();
    for (Stage k : kDiagnosedStages) {
      m[state_index(k)] = cond[diagnosed_index(k)] * r.incidence;
    }
    out.mu.push_back(m);
  }
  return out;
}

std::vector<JointCell> build_pi(const SurvivalModel& surv, std::size_t j, Stage k) {
  if (k == Stage::NoCancer) throw DomainError("joint death distribution needs a diagnosed stage");
  const SurvivalCurve& c = surv.curve(j, k);
  std::vector<JointCell> cells;
  cells.reserve(c.pmf.size());
  for (int t = c.first_t; t <= c.last_t(); ++t) {
    const double lambda = c.lambda(t);
    const double split = c.bc_share(t);
    cells.push_back({t, split * lambda, (1.0 - split) * lambda});
  }
  return cells;
}

std::vector<double> death_time_distribution(std::size_t j, const StageDistribution& mu,
                                            const SurvivalModel& surv) {
  const int horizon = surv.grid().years_to_horizon(j);
  std::vector<double> out(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (int t = 0; t <= horizon; ++t) {
    CompensatedSum acc;
    for (Stage k : kAllStates) acc += surv.curve(j, k).lambda(t) * mu.at(j, k);
    out[static_cast<std::size_t>(t)] = acc.value();
  }
  return out;
}

RoundRemoval round_removal(std::size_t j, const StageDistribution& mu,
                           const SurvivalModel& surv) {
  const IntervalSplit& split = surv.interval(j);
  CompensatedSum death;
  CompensatedSum diagnosed;
  death += mu.at(j, Stage::NoCancer) * (split.p_die_year0 + split.p_die_year1);
  for (Stage k : kDiagnosedStages) {
    const SurvivalCurve& c = surv.curve(j, k);
    const double m = mu.at(j, k);
    // Diagnosed survival starts at t = 1, so only year 1 falls before the
    // next round.
    death += m * c.lambda(1);
    CompensatedSum later;
    for (int t = 2; t <= c.last_t(); ++t) later += c.lambda(t);
    diagnosed += m * later.value();
  }
  return {death.value(), diagnosed.value()};
}

std::vector<double> cohort_trajectory(const StageDistribution& mu, const SurvivalModel& surv,
                                      double cohort_size) {
  if (!(cohort_size > 0.0)) throw DomainError("cohort size must be positive");
  require_same_length(mu.size(), surv.grid().size(), "stage distribution vs survival grid");
  std::vector<double> n(mu.size(), 0.0);
  if (n.empty()) return n;
  n[0] = cohort_size;
  for (std::size_t j = 0; j + 1 < n.size(); ++j) {
    const RoundRemoval r = round_removal(j, mu, surv);
    const double keep = 1.0 - r.interval_death - r.survive_diagnosed;
    n[j + 1] = n[j] * std::max(keep, 0.0);
  }
  return n;
}

double expected_life_years(const StageDistribution& mu, const SurvivalModel& surv,
                           std::span<const double> trajectory) {
  require_same_length(mu.size(), trajectory.size(), "stage distribution vs trajectory");
  CompensatedSum total;
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    const double n = trajectory[j];
    if (j >= 1) total += kIntervalYears * n;
    // Undiagnosed who die in year 1 of the interval are credited one year.
    total += surv.curve(j, Stage::NoCancer).lambda(1) * mu.at(j, Stage::NoCancer) * n;
    for (Stage k : kDiagnosedStages) {
      total += mu.at(j, k) * surv.curve(j, k).expected_years() * n;
    }
  }
  return total.value();
}

double per_case_cost(const TreatmentCosts& c, int n, DeathCause cause) {
  if (n < 1) throw DomainError("years lived after diagnosis must be >= 1, got " +
                               std::to_string(n));
  const int maintained = std::min(n - 1, kMaintenanceYears);
  if (cause == DeathCause::OtherCause) {
    return c.first_year + maintained * c.maintenance_year;
  }
  if (n <= 2) return (n - 1) * c.first_year + c.terminal_year;
  // The last year before death is billed as terminal, not maintenance.
  return c.first_year + std::min(n - 2, kMaintenanceYears) * c.maintenance_year +
         c.terminal_year;
}

double per_case_cost(const CostModel& costs, std::size_t band, Stage k, int n,
                     DeathCause cause) {
  return per_case_cost(costs.costs(band, k), n, cause);
}

double expected_case_cost(std::size_t j, Stage k, const SurvivalModel& surv,
                          const CostModel& costs) {
  const std::size_t band = costs.band_index_for_age(surv.grid()[j].start_age);
  const TreatmentCosts& c = costs.costs(band, k);
  CompensatedSum acc;
  for (const JointCell& cell : build_pi(surv, j, k)) {
    acc += per_case_cost(c, cell.t, DeathCause::BreastCancer) * cell.bc;
    acc += per_case_cost(c, cell.t, DeathCause::OtherCause) * cell.other;
  }
  return acc.value();
}

double expected_costs_age(std::size_t j, const Policy& policy, const StageDistribution& mu,
                          const SurvivalModel& surv, const CostModel& costs,
                          std::span<const double> trajectory) {
  const double n = trajectory[j];
  CompensatedSum acc;
  acc += n * costs.screening_cost(policy.h.at(j));
  for (Stage k : kDiagnosedStages) {
    const double m = mu.at(j, k);
    if (m == 0.0) continue;
    acc += n * m * expected_case_cost(j, k, surv, costs);
  }
  return acc.value();
}

double expected_costs_total(std::span<const double> age_costs) {
  return compensated_sum(age_costs);
}

double expected_bc_deaths(const StageDistribution& mu, const SurvivalModel& surv,
                          std::span<const double> trajectory) {
  require_same_length(mu.size(), trajectory.size(), "stage distribution vs trajectory");
  CompensatedSum total;
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    for (Stage k : kDiagnosedStages) {
      CompensatedSum bc;
      for (const JointCell& cell : build_pi(surv, j, k)) bc += cell.bc;
      total += trajectory[j] * mu.at(j, k) * bc.value();
    }
  }
  return total.value();
}

ScenarioResult evaluate_scenario(const Policy& policy, const EpidemiologyTable& epi,
                                 const SurvivalModel& surv, const CostModel& costs,
                                 double cohort_size) {
  if (policy.h.size() != epi.grid.size()) {
    throw ValidationError("policy " + policy.name + " has " + std::to_string(policy.h.size()) +
                          " entries for " + std::to_string(epi.grid.size()) + " age groups");
  }
  if (!(epi.grid == surv.grid())) {
    throw ValidationError("epidemiology and survival tables use different age grids");
  }
  const StageDistribution mu = build_mu(epi);

  ScenarioResult r;
  r.policy_name = policy.name;
  r.trajectory = cohort_trajectory(mu, surv, cohort_size);
  r.age_costs.reserve(r.trajectory.size());
  for (std::size_t j = 0; j < r.trajectory.size(); ++j) {
    r.age_costs.push_back(expected_costs_age(j, policy, mu, surv, costs, r.trajectory));
  }
  r.total_cost = expected_costs_total(r.age_costs);
  r.total_life_years = expected_life_years(mu, surv, r.trajectory);
  r.bc_deaths = expected_bc_deaths(mu, surv, r.trajectory);
  r.cost_per_life_year = cost_per_life_year(r.total_cost, r.total_life_years);
  return r;
}

// ---------------------------------------------------------------------------

IcerResult icer(double baseline_cost, double baseline_life_years, double alternative_cost,
                double alternative_life_years) {
  IcerResult r;
  r.delta_cost = alternative_cost - baseline_cost;
  r.delta_life_years = alternative_life_years - baseline_life_years;
  if (std::fabs(r.delta_life_years) < kIcerMinLifeYearDifference) {
    r.verdict = IcerVerdict::Undefined;
    return r;
  }
  r.value = r.delta_cost / r.delta_life_years;
  if (*r.value < 0.0) {
    r.verdict = r.delta_life_years > 0.0 ? IcerVerdict::Dominant : IcerVerdict::Dominated;
  } else {
    r.verdict = IcerVerdict::Ratio;
  }
  return r;
}

IcerResult icer(const ScenarioResult& baseline, const ScenarioResult& alternative) {
  return icer(baseline.total_cost, baseline.total_life_years, alternative.total_cost,
              alternative.total_life_years);
}

std::string icer_note(IcerVerdict verdict) {
  switch (verdict) {
    case IcerVerdict::Ratio: return "";
    case IcerVerdict::Dominant: return "dominant (saves money and life years)";
    case IcerVerdict::Dominated: return "dominated";
    case IcerVerdict::Undefined: return "undefined (no life-year difference)";
  }
  return "";
}

std::optional<double> cost_per_life_year(double total_cost, double total_life_years) {
  if (!(total_life_years > 0.0)) return std::nullopt;
  return total_cost / total_life_years;
}

std::optional<double> cost_per_life_year(const ScenarioResult& result) {
  return cost_per_life_year(result.total_cost, result.total_life_years);
}

}  // namespace cohortce

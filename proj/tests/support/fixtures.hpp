#pragma once

// Small hand-built models for example-based tests.

#include <filesystem>
#include <functional>
#include <vector>

#include "cohortce/types.hpp"

namespace cohortce::testing {

inline std::filesystem::path data_root() { return COHORT_CE_DATA_ROOT; }

inline SurvivalCurve make_curve(int first_t, std::vector<double> pmf, std::vector<double> bc) {
  SurvivalCurve c;
  c.first_t = first_t;
  c.pmf = std::move(pmf);
  c.bc_fraction = std::move(bc);
  return c;
}

inline SurvivalCurve point_mass(int t, double bc_share = 0.0) {
  return make_curve(t, {1.0}, {bc_share});
}

/// Interval split implied by an undiagnosed curve.
inline IntervalSplit split_of(const SurvivalCurve& c) {
  IntervalSplit s;
  s.p_die_year0 = c.lambda(0);
  s.p_die_year1 = c.lambda(1);
  s.p_survive = 1.0 - s.p_die_year0 - s.p_die_year1;
  return s;
}

using CurveFactory = std::function<SurvivalCurve(std::size_t j, Stage k)>;

inline SurvivalModel make_survival(const AgeGrid& grid, const CurveFactory& f) {
  std::vector<std::array<SurvivalCurve, kNumStates>> curves(grid.size());
  std::vector<IntervalSplit> interval(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (Stage k : kAllStates) curves[j][state_index(k)] = f(j, k);
    interval[j] = split_of(curves[j][state_index(Stage::NoCancer)]);
  }
  return SurvivalModel(grid, std::move(curves), std::move(interval));
}

/// Everyone undiagnosed survives the interval and dies at the horizon;
/// diagnosed cases live `diagnosed_t` years and die of `diagnosed_bc`.
inline SurvivalModel simple_survival(const AgeGrid& grid, int diagnosed_t = 5,
                                     double diagnosed_bc = 0.0) {
  return make_survival(grid, [&](std::size_t j, Stage k) {
    if (k == Stage::NoCancer) return point_mass(grid.years_to_horizon(j) - 1);
    return point_mass(diagnosed_t, diagnosed_bc);
  });
}

inline EpidemiologyTable uniform_epi(const AgeGrid& grid, double incidence, StageVector cond) {
  EpidemiologyTable epi;
  epi.grid = grid;
  epi.rows.assign(grid.size(), EpidemiologyRow{incidence, cond, 0.0});
  return epi;
}

/// Same numbers in every cell of every band.
inline CostModel flat_costs(double unit, TreatmentCosts c) {
  CostModel m;
  m.screening_unit_cost = unit;
  m.bands = standard_cost_bands();
  m.treatment.resize(m.bands.size());
  for (auto& band : m.treatment) band.fill(c);
  return m;
}

inline Policy all_screen(const AgeGrid& grid) {
  return Policy{"all", std::vector<ScreeningChoice>(grid.size(), ScreeningChoice::Screen)};
}

inline Policy no_screen(const AgeGrid& grid) {
  return Policy{"none", std::vector<ScreeningChoice>(grid.size(), ScreeningChoice::NoScreen)};
}

}  // namespace cohortce::testing

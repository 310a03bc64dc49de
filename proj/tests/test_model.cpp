#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cohortce/bundle.hpp"
#include "cohortce/error.hpp"
#include "cohortce/model.hpp"
#include "cohortce/numeric.hpp"
#include "cohortce/report.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace cohortce;
using namespace cohortce::testing;

namespace {

const CostModel& paper_costs() {
  static const CostModel costs = load_bundle(data_root() / "synthetic_j27_smooth").costs;
  return costs;
}

StageVector only(Stage k) {
  StageVector v{};
  v[diagnosed_index(k)] = 1.0;
  return v;
}

}  // namespace

// build_mu ------------------------------------------------------------------

TEST(BuildMu, ZeroIncidenceIsAllNoCancer) {
  const auto grid = AgeGrid::from_first_age(50, 2);
  const auto mu = build_mu(uniform_epi(grid, 0.0, {0.1, 0.5, 0.3, 0.05, 0.05}));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    EXPECT_EQ(mu.at(j, Stage::NoCancer), 1.0);
    for (Stage k : kDiagnosedStages) EXPECT_EQ(mu.at(j, k), 0.0);
  }
}

TEST(BuildMu, LocalizedShareExample) {
  StageVector cond{0.1, 0.522, 0.278, 0.05, 0.05};
  const auto mu = build_mu(uniform_epi(AgeGrid::from_first_age(50, 1), 0.002, cond));
  EXPECT_NEAR(mu.at(0, Stage::Localized), 0.001044, 1e-15);
  EXPECT_NEAR(mu.at(0, Stage::NoCancer), 0.998, 1e-15);
}

TEST(BuildMu, CertainDiagnosis) {
  const auto mu = build_mu(uniform_epi(AgeGrid::from_first_age(50, 1), 1.0, {0.2, 0.2, 0.2, 0.2, 0.2}));
  EXPECT_EQ(mu.at(0, Stage::NoCancer), 0.0);
  for (Stage k : kDiagnosedStages) EXPECT_DOUBLE_EQ(mu.at(0, k), 0.2);
}

TEST(BuildMu, InvalidRowNamesGroup) {
  auto epi = uniform_epi(AgeGrid::from_first_age(50, 3), 0.01, {0.1, 0.5, 0.3, 0.05, 0.05});
  epi.rows[1].cond_stage[1] = 0.48;
  try {
    build_mu(epi);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("52-53"), std::string::npos) << e.what();
  }
}

TEST(BuildMu, IncidenceAboveOneRejected) {
  auto epi = uniform_epi(AgeGrid::from_first_age(50, 1), 1.5, only(Stage::Localized));
  EXPECT_THROW(build_mu(epi), ValidationError);
}

// build_pi ------------------------------------------------------------------

TEST(BuildPi, NoBreastCancerDeaths) {
  const auto grid = AgeGrid::from_first_age(90, 1);
  const auto surv = make_survival(grid, [](std::size_t, Stage k) {
    if (k == Stage::NoCancer) return point_mass(5);
    return make_curve(1, {0.2, 0.3, 0.5}, {0.0, 0.0, 0.0});
  });
  for (const auto& cell : build_pi(surv, 0, Stage::Regional)) EXPECT_EQ(cell.bc, 0.0);
}

TEST(BuildPi, PointMassSplit) {
  const auto grid = AgeGrid::from_first_age(90, 1);
  const auto surv = make_survival(grid, [](std::size_t, Stage k) {
    return k == Stage::NoCancer ? point_mass(5) : point_mass(3, 0.4);
  });
  const auto cells = build_pi(surv, 0, Stage::Unknown);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].t, 3);
  EXPECT_DOUBLE_EQ(cells[0].bc, 0.4);
  EXPECT_DOUBLE_EQ(cells[0].other, 0.6);
}

TEST(BuildPi, UniformTwoYearCells) {
  const auto grid = AgeGrid::from_first_age(90, 1);
  const auto surv = make_survival(grid, [](std::size_t, Stage k) {
    return k == Stage::NoCancer ? point_mass(5) : make_curve(1, {0.5, 0.5}, {0.5, 1.0});
  });
  const auto cells = build_pi(surv, 0, Stage::Localized);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].t, 1);
  EXPECT_EQ(cells[0].bc, 0.25);
  EXPECT_EQ(cells[0].other, 0.25);
  EXPECT_EQ(cells[1].t, 2);
  EXPECT_EQ(cells[1].bc, 0.5);
  EXPECT_EQ(cells[1].other, 0.0);
  EXPECT_EQ(cells[0].bc + cells[0].other + cells[1].bc + cells[1].other, 1.0);
}

TEST(BuildPi, MissingCurveIsDataError) {
  const auto grid = AgeGrid::from_first_age(90, 1);
  std::vector<std::array<SurvivalCurve, kNumStates>> curves(1);
  curves[0][state_index(Stage::NoCancer)] = point_mass(5);
  const SurvivalModel surv(grid, curves, {IntervalSplit{}});
  EXPECT_THROW(build_pi(surv, 0, Stage::Distant), DataError);
  EXPECT_THROW(build_pi(surv, 0, Stage::NoCancer), DomainError);
}

// death_time_distribution ---------------------------------------------------

TEST(DeathTime, SingleComponent) {
  const auto grid = AgeGrid::from_first_age(94, 1);
  const auto surv = make_survival(grid, [](std::size_t, Stage k) {
    if (k == Stage::NoCancer) return make_curve(0, {0.1, 0.2, 0.3, 0.4}, {0, 0, 0, 0});
    return point_mass(2);
  });
  const auto mu = build_mu(uniform_epi(grid, 0.0, only(Stage::Localized)));
  const auto p = death_time_distribution(0, mu, surv);
  ASSERT_EQ(p.size(), 7u);
  const std::vector<double> expected{0.1, 0.2, 0.3, 0.4, 0.0, 0.0, 0.0};
  for (std::size_t t = 0; t < p.size(); ++t) EXPECT_EQ(p[t], expected[t]) << "t=" << t;
}

TEST(DeathTime, TwoPointMasses) {
  const auto grid = AgeGrid::from_first_age(90, 1);
  const auto surv = make_survival(grid, [](std::size_t, Stage k) {
    return k == Stage::NoCancer ? point_mass(2) : point_mass(4);
  });
  const auto mu = build_mu(uniform_epi(grid, 0.5, only(Stage::Localized)));
  const auto p = death_time_distribution(0, mu, surv);
  EXPECT_EQ(p[2], 0.5);
  EXPECT_EQ(p[4], 0.5);
  EXPECT_EQ(p[0] + p[1] + p[3], 0.0);
}

TEST(DeathTime, ThreeStageMixtureByHand) {
  const auto grid = AgeGrid::from_first_age(94, 1);
  const auto surv = make_survival(grid, [](std::size_t, Stage k) {
    switch (k) {
      case Stage::NoCancer: return make_curve(0, {0.1, 0.2, 0.3, 0.4}, {0, 0, 0, 0});
      case Stage::Localized: return make_curve(1, {0.5, 0.5}, {0, 0});
      case Stage::Distant: return make_curve(2, {0.2, 0.3, 0.5}, {1, 1, 1});
      default: return point_mass(6);
    }
  });
  // mu(-1) = 0.7, mu(1) = 0.2, mu(3) = 0.1
  const auto mu = build_mu(uniform_epi(grid, 0.3, {0.0, 2.0 / 3.0, 0.0, 1.0 / 3.0, 0.0}));
  const auto p = death_time_distribution(0, mu, surv);
  const std::vector<double> expected{
      0.7 * 0.1,
      0.7 * 0.2 + 0.2 * 0.5,
      0.7 * 0.3 + 0.2 * 0.5 + 0.1 * 0.2,
      0.7 * 0.4 + 0.1 * 0.3,
      0.1 * 0.5,
      0.0,
      0.0};
  ASSERT_EQ(p.size(), expected.size());
  double total = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    EXPECT_NEAR(p[t], expected[t], 1e-15) << "t=" << t;
    total += p[t];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

// cohort_trajectory ---------------------------------------------------------

TEST(Trajectory, NoRemovalKeepsEveryone) {
  const auto grid = AgeGrid::from_first_age(46, 6);
  const auto surv = simple_survival(grid);
  const auto n = cohort_trajectory(build_mu(uniform_epi(grid, 0.0, only(Stage::Localized))), surv);
  for (double x : n) EXPECT_EQ(x, kDefaultCohortSize);
}

TEST(Trajectory, OnePercentDiagnosedPerRound) {
  const auto grid = AgeGrid::from_first_age(46, 6);
  const auto surv = simple_survival(grid, 5);
  const auto n = cohort_trajectory(build_mu(uniform_epi(grid, 0.01, only(Stage::Regional))), surv);
  ASSERT_EQ(n.size(), 6u);
  EXPECT_EQ(n[0], 100000.0);
  for (std::size_t j = 1; j < n.size(); ++j) EXPECT_NEAR(n[j], 0.99 * n[j - 1], 1e-9);
}

TEST(Trajectory, RejectsNonPositiveCohort) {
  const auto grid = AgeGrid::from_first_age(46, 2);
  const auto mu = build_mu(uniform_epi(grid, 0.0, only(Stage::Localized)));
  EXPECT_THROW(cohort_trajectory(mu, simple_survival(grid), 0.0), DomainError);
}

// expected_life_years -------------------------------------------------------

TEST(LifeYears, EveryoneLivesOneYear) {
  const auto grid = AgeGrid::from_first_age(60, 1);
  const auto surv = make_survival(grid, [](std::size_t, Stage k) {
    return k == Stage::NoCancer ? point_mass(1) : point_mass(5);
  });
  const auto mu = build_mu(uniform_epi(grid, 0.0, only(Stage::Localized)));
  const std::vector<double> n{100.0};
  EXPECT_EQ(expected_life_years(mu, surv, n), 100.0);
}

TEST(LifeYears, LocalizedFiveYears) {
  const auto grid = AgeGrid::from_first_age(60, 1);
  const auto surv = make_survival(grid, [](std::size_t, Stage k) {
    return k == Stage::NoCancer ? point_mass(1) : make_curve(3, {0.5, 0, 0, 0, 0.5}, {0, 0, 0, 0, 0});
  });
  const auto mu = build_mu(uniform_epi(grid, 1.0, only(Stage::Localized)));
  const std::vector<double> n{200.0};
  EXPECT_EQ(expected_life_years(mu, surv, n), 1000.0);
}

// per_case_cost -------------------------------------------------------------

TEST(PerCaseCost, PaperCells) {
  const CostModel& c = paper_costs();
  EXPECT_EQ(per_case_cost(c, c.band_index_for_age(50), Stage::Localized, 3, DeathCause::OtherCause),
            22000.0);
  EXPECT_EQ(per_case_cost(c, c.band_index_for_age(46), Stage::Distant, 1, DeathCause::BreastCancer),
            55400.0);
  EXPECT_EQ(per_case_cost(c, c.band_index_for_age(70), Stage::Regional, 7, DeathCause::BreastCancer),
            49600.0);
}

TEST(PerCaseCost, MatchesYearByYearAccrual) {
  const CostModel& costs = paper_costs();
  for (std::size_t band = 0; band < costs.bands.size(); ++band) {
    for (Stage k : kDiagnosedStages) {
      for (DeathCause d : {DeathCause::BreastCancer, DeathCause::OtherCause}) {
        for (int n = 1; n <= 8; ++n) {
          EXPECT_EQ(per_case_cost(costs, band, k, n, d),
                    accrue_case_cost(costs.costs(band, k), n, d))
              << "band " << band << " stage " << stage_code(k) << " n " << n;
        }
      }
    }
  }
}

TEST(PerCaseCost, ShapeProperties) {
  const TreatmentCosts c{18000, 2000, 30000};
  for (int n = 1; n < 12; ++n) {
    EXPECT_LE(per_case_cost(c, n, DeathCause::OtherCause), per_case_cost(c, n + 1, DeathCause::OtherCause));
    if (n > 5) {
      EXPECT_EQ(per_case_cost(c, n, DeathCause::OtherCause), per_case_cost(c, 6, DeathCause::OtherCause));
      EXPECT_EQ(per_case_cost(c, n, DeathCause::BreastCancer), per_case_cost(c, 6, DeathCause::BreastCancer));
    }
  }
}

TEST(PerCaseCost, RejectsZeroYears) {
  const TreatmentCosts c{1, 1, 1};
  EXPECT_THROW(per_case_cost(c, 0, DeathCause::OtherCause), DomainError);
  EXPECT_THROW(per_case_cost(c, -3, DeathCause::BreastCancer), DomainError);
  EXPECT_THROW(per_case_cost(paper_costs(), 0, Stage::NoCancer, 1, DeathCause::OtherCause), DomainError);
}

// expected_costs_age / total -------------------------------------------------

TEST(CostsAge, NoScreeningNoCases) {
  const auto grid = AgeGrid::from_first_age(50, 1);
  const auto mu = build_mu(uniform_epi(grid, 0.0, only(Stage::Localized)));
  const std::vector<double> n{1000.0};
  EXPECT_EQ(expected_costs_age(0, no_screen(grid), mu, simple_survival(grid), paper_costs(), n), 0.0);
}

TEST(CostsAge, ScreeningOnly) {
  const auto grid = AgeGrid::from_first_age(50, 1);
  const auto mu = build_mu(uniform_epi(grid, 0.0, only(Stage::Localized)));
  const std::vector<double> n{1000.0};
  EXPECT_EQ(expected_costs_age(0, all_screen(grid), mu, simple_survival(grid), paper_costs(), n),
            30000.0);
}

TEST(CostsAge, SingleDistantCell) {
  const auto grid = AgeGrid::from_first_age(46, 1);
  const auto surv = simple_survival(grid, 1, 1.0);
  const auto mu = build_mu(uniform_epi(grid, 0.001, only(Stage::Distant)));
  const std::vector<double> n{100000.0};
  EXPECT_NEAR(expected_costs_age(0, no_screen(grid), mu, surv, paper_costs(), n), 5540000.0, 1e-6);
  EXPECT_NEAR(expected_costs_age(0, all_screen(grid), mu, surv, paper_costs(), n),
              5540000.0 + 100000.0 * 30.0, 1e-6);
}

TEST(CostsTotal, Sums) {
  EXPECT_EQ(expected_costs_total(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_EQ(expected_costs_total(std::vector<double>{100, 200, 300}), 600.0);
}

TEST(CostsTotal, ReorderedResummationAgrees) {
  const DataBundle bundle = load_bundle(data_root() / "synthetic_j27_smooth");
  const ScenarioResult r = run_scenario(*bundle.config.find(bundle.config.baseline_id), bundle);
  ASSERT_EQ(r.age_costs.size(), 27u);
  std::vector<double> reversed(r.age_costs.rbegin(), r.age_costs.rend());
  EXPECT_EQ(compensated_sum(reversed), r.total_cost);
  EXPECT_EQ(expected_costs_total(r.age_costs), r.total_cost);
}

// BC deaths -----------------------------------------------------------------

TEST(BcDeaths, NoBreastCancerCause) {
  const auto grid = AgeGrid::from_first_age(50, 4);
  const auto surv = simple_survival(grid, 3, 0.0);
  const auto mu = build_mu(uniform_epi(grid, 0.05, {0.1, 0.5, 0.3, 0.05, 0.05}));
  EXPECT_EQ(expected_bc_deaths(mu, surv, cohort_trajectory(mu, surv)), 0.0);
}

TEST(BcDeaths, NoDiagnoses) {
  const auto grid = AgeGrid::from_first_age(50, 4);
  const auto surv = simple_survival(grid, 3, 1.0);
  const auto mu = build_mu(uniform_epi(grid, 0.0, {0.1, 0.5, 0.3, 0.05, 0.05}));
  EXPECT_EQ(expected_bc_deaths(mu, surv, cohort_trajectory(mu, surv)), 0.0);
}

// icer / cost per life year -------------------------------------------------

TEST(Icer, TableOneExtensionRow) {
  const IcerResult r = icer(245498112.0, 3860854.8, 245498112.0 + 769778.0, 3861654.4);
  ASSERT_TRUE(r.value.has_value());
  EXPECT_NEAR(*r.value, 962.7, 0.05);
  EXPECT_EQ(format_icer(r), "963");
  EXPECT_EQ(r.verdict, IcerVerdict::Ratio);
}

TEST(Icer, TableThreeNegativeRow) {
  const IcerResult r = icer(0.0, 0.0, -14238582.0, 2573.5);
  ASSERT_TRUE(r.value.has_value());
  EXPECT_EQ(format_icer(r), "-5533");
  EXPECT_EQ(r.verdict, IcerVerdict::Dominant);
  EXPECT_EQ(icer_note(r.verdict), "dominant (saves money and life years)");
}

TEST(Icer, Dominated) {
  const IcerResult r = icer(0.0, 100.0, 500.0, 90.0);
  EXPECT_EQ(r.verdict, IcerVerdict::Dominated);
  EXPECT_EQ(icer_note(r.verdict), "dominated");
}

TEST(Icer, IdenticalScenariosUndefined) {
  ScenarioResult a;
  a.total_cost = 1e6;
  a.total_life_years = 5e5;
  const IcerResult r = icer(a, a);
  EXPECT_FALSE(r.value.has_value());
  EXPECT_EQ(r.verdict, IcerVerdict::Undefined);
  EXPECT_EQ(format_icer(r), "undefined");
  EXPECT_EQ(icer_note(r.verdict), "undefined (no life-year difference)");
}

TEST(Icer, SwapInvariant) {
  const IcerResult a = icer(100.0, 10.0, 250.0, 13.0);
  const IcerResult b = icer(250.0, 13.0, 100.0, 10.0);
  EXPECT_EQ(*a.value, *b.value);
}

TEST(CostPerLifeYear, TableOneRatio) {
  const auto r = cost_per_life_year(245498112.0, 3860854.8);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(format_ratio(*r), "63.59");
  EXPECT_EQ(cost_per_life_year(0.0, 10.0), 0.0);
  EXPECT_EQ(cost_per_life_year(123.0, 4.0), 123.0 / 4.0);
  EXPECT_FALSE(cost_per_life_year(10.0, 0.0).has_value());
}

// rounding ------------------------------------------------------------------

TEST(Rounding, HalfAwayFromZeroWithoutNegativeZero) {
  EXPECT_EQ(format_cost(2.5), "3");
  EXPECT_EQ(format_cost(-2.5), "-3");
  EXPECT_EQ(format_cost(-0.4), "0");
  EXPECT_EQ(format_life_years(3860854.84), "3860854.8");
  EXPECT_EQ(format_ratio(0.125), "0.13");
}

#pragma once

// Model invariants checked over generated bundles. Each check returns an
// empty string on success and a description of the first violation
// otherwise, so both the gtest suite and the acceptance runner can use them.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "cohortce/error.hpp"
#include "cohortce/model.hpp"
#include "cohortce/scenario.hpp"
#include "support/random_bundle.hpp"

namespace cohortce::testing {

inline void append_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

inline void append_double(std::string& out, double x) { append_bytes(out, &x, sizeof x); }

/// Raw bytes of every number in the survival model.
inline std::string fingerprint(const SurvivalModel& surv) {
  std::string out;
  for (std::size_t j = 0; j < surv.grid().size(); ++j) {
    for (Stage k : kAllStates) {
      const SurvivalCurve& c = surv.curve(j, k);
      append_bytes(out, &c.first_t, sizeof c.first_t);
      for (double p : c.pmf) append_double(out, p);
      for (double p : c.bc_fraction) append_double(out, p);
    }
    const IntervalSplit& s = surv.interval(j);
    append_double(out, s.p_die_year0);
    append_double(out, s.p_die_year1);
    append_double(out, s.p_survive);
  }
  return out;
}

inline std::string fingerprint(const CostModel& costs) {
  std::string out;
  append_double(out, costs.screening_unit_cost);
  for (const AgeBand& b : costs.bands) {
    append_bytes(out, &b.start_age, sizeof b.start_age);
    append_bytes(out, &b.end_age, sizeof b.end_age);
  }
  for (const auto& band : costs.treatment) {
    for (const TreatmentCosts& c : band) {
      append_double(out, c.first_year);
      append_double(out, c.maintenance_year);
      append_double(out, c.terminal_year);
    }
  }
  return out;
}

inline std::string describe(const char* what, std::size_t j, double got) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at group " << j << ": " << got;
  return os.str();
}

inline std::string check_normalization(const RandomBundle& b) {
  const StageDistribution mu = build_mu(b.epi);
  for (std::size_t j = 0; j < mu.size(); ++j) {
    double total = 0.0;
    for (double p : mu.mu[j]) {
      if (p < 0.0) return describe("negative stage probability", j, p);
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) return describe("stage distribution sums to", j, total);
  }
  return {};
}

inline std::string check_trajectory(const RandomBundle& b) {
  const StageDistribution mu = build_mu(b.epi);
  const std::vector<double> n = cohort_trajectory(mu, b.surv, kDefaultCohortSize);
  if (n.empty() || n[0] != kDefaultCohortSize) return "trajectory does not start at N0";
  bool removal_below_one = true;
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] < 0.0) return describe("negative occupancy", j, n[j]);
    if (j > 0 && n[j] > n[j - 1]) return describe("occupancy increases", j, n[j]);
    if (j > 0 && removal_below_one && !(n[j] > 0.0)) return describe("occupancy hits zero", j, n[j]);
    const RoundRemoval r = round_removal(j, mu, b.surv);
    removal_below_one = removal_below_one && r.interval_death + r.survive_diagnosed < 1.0;
  }
  return {};
}

inline std::string check_linearity(const RandomBundle& b) {
  const ScenarioResult one = evaluate_scenario(b.policy, b.epi, b.surv, b.costs, 100000.0);
  const ScenarioResult two = evaluate_scenario(b.policy, b.epi, b.surv, b.costs, 200000.0);
  if (two.total_life_years != 2.0 * one.total_life_years) {
    return describe("life years not doubled", 0, two.total_life_years / one.total_life_years);
  }
  if (two.total_cost != 2.0 * one.total_cost) {
    return describe("cost not doubled", 0, two.total_cost / one.total_cost);
  }
  if (two.bc_deaths != 2.0 * one.bc_deaths) {
    return describe("BC deaths not doubled", 0, two.bc_deaths / one.bc_deaths);
  }
  return {};
}

/// A random scenario with a random extension and up to three transforms.
inline ScenarioSpec random_spec(BundleGenerator& gen) {
  ScenarioSpec spec;
  spec.id = "random";
  spec.label = "random";
  spec.extension = static_cast<Extension>(gen.uniform_int(0, 3));
  const int transforms = gen.uniform_int(0, 3);
  for (int i = 0; i < transforms; ++i) {
    SensitivityTransform t;
    t.kind = static_cast<TransformKind>(gen.uniform_int(0, 2));
    t.magnitude = t.kind == TransformKind::StageShift ? gen.uniform(-0.05, 0.05)
                                                      : gen.uniform(-0.2, 0.5);
    t.scope.kind = gen.coin(0.5) ? AgeScope::Kind::Modelled : AgeScope::Kind::All;
    spec.transforms.push_back(t);
  }
  return spec;
}

/// Needs a bundle on the standard 46..98 grid.
inline std::string check_isolation(const RandomBundle& b, BundleGenerator& gen) {
  const std::string surv_before = fingerprint(b.surv);
  const std::string costs_before = fingerprint(b.costs);
  ScenarioInputs inputs{b.epi, b.older, std::nullopt};
  const ScenarioSpec spec = random_spec(gen);
  try {
    const BuiltScenario built = build_scenario(spec, inputs, b.costs);
    (void)evaluate_scenario(built.policy, built.epi, b.surv, built.costs);
  } catch (const ValidationError&) {
    // A transform may legitimately reject its result; isolation must still hold.
  }
  if (fingerprint(b.surv) != surv_before) return "survival model changed by a scenario run";
  if (fingerprint(b.costs) != costs_before) return "cost model changed by a scenario run";
  if (!(inputs.baseline == b.epi)) return "baseline snapshot changed by a scenario run";
  return {};
}

inline std::string check_icer_swap(const RandomBundle& b, BundleGenerator& gen) {
  Policy other = b.policy;
  for (auto& h : other.h) {
    if (gen.coin(0.5)) h = h == ScreeningChoice::Screen ? ScreeningChoice::NoScreen : ScreeningChoice::Screen;
  }
  EpidemiologyTable epi = b.epi;
  for (auto& row : epi.rows) {
    if (gen.coin(0.5)) row.incidence *= 0.5;
  }
  const ScenarioResult a = evaluate_scenario(b.policy, b.epi, b.surv, b.costs);
  const ScenarioResult c = evaluate_scenario(other, epi, b.surv, b.costs);
  const IcerResult forward = icer(a, c);
  const IcerResult backward = icer(c, a);
  if (forward.value.has_value() != backward.value.has_value()) return "ICER defined one way only";
  if (forward.value && *forward.value != *backward.value) {
    return describe("ICER changes under swap", 0, *forward.value - *backward.value);
  }
  return {};
}

/// Relative tolerance for the cost-scale check; see the README.
inline constexpr double kCostScaleTolerance = 1e-12;

inline std::string check_cost_scaling(const RandomBundle& b, double factor) {
  CostModel free = b.costs;
  free.screening_unit_cost = 0.0;
  SensitivityTransform t;
  t.kind = TransformKind::CostScale;
  t.magnitude = factor - 1.0;
  t.scope.kind = AgeScope::Kind::All;
  const CostModel scaled = apply_cost_scale(t, free);
  const double base = evaluate_scenario(b.policy, b.epi, b.surv, free).total_cost;
  const double after = evaluate_scenario(b.policy, b.epi, b.surv, scaled).total_cost;
  if (std::fabs(after - factor * base) > kCostScaleTolerance * std::fabs(factor * base)) {
    return describe("cost scaling off by", 0, after - factor * base);
  }
  return {};
}

/// Moves conditional mass from Regional to Localized after making every
/// group's Localized survival at least as long as Regional.
inline std::string check_stage_shift_monotone(RandomBundle b, BundleGenerator& gen) {
  std::vector<std::array<SurvivalCurve, kNumStates>> curves(b.epi.grid.size());
  std::vector<IntervalSplit> interval;
  for (std::size_t j = 0; j < curves.size(); ++j) {
    for (Stage k : kAllStates) curves[j][state_index(k)] = b.surv.curve(j, k);
    auto& loc = curves[j][state_index(Stage::Localized)];
    auto& reg = curves[j][state_index(Stage::Regional)];
    if (loc.expected_years() < reg.expected_years()) std::swap(loc, reg);
    interval.push_back(b.surv.interval(j));
  }
  const SurvivalModel surv(b.epi.grid, std::move(curves), std::move(interval));
  const double before = evaluate_scenario(b.policy, b.epi, surv, b.costs).total_life_years;
  for (auto& row : b.epi.rows) {
    const double moved = row.cond_stage[2] * gen.uniform(0.0, 1.0);
    row.cond_stage[2] -= moved;
    row.cond_stage[1] += moved;
  }
  const double after = evaluate_scenario(b.policy, b.epi, surv, b.costs).total_life_years;
  if (after < before * (1.0 - 1e-12)) return describe("life years decreased by", 0, before - after);
  return {};
}

}  // namespace cohortce::testing

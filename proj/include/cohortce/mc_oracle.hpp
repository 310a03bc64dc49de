#pragma once

// Individual-level replay of the cohort model by sampling. It follows the
// closed-form accounting exactly (same life-year crediting, same cost
// schedule), so agreement tests the implementation rather than the model.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cohortce/types.hpp"

namespace cohortce {

/// Counter-based stream: draw i of individual n depends only on
/// (seed, n, i), so any parallel schedule yields the same records.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct McConfig {
  std::uint64_t seed = 20240101;
  std::uint64_t individuals = 1'000'000;
  /// Individuals handed to a worker at a time. Does not affect results.
  std::uint64_t batch_size = 65536;
  /// Worker threads; 0 means hardware concurrency. Does not affect results.
  unsigned threads = 1;
};

struct IndividualRecord {
  double life_years = 0.0;
  double cost = 0.0;
  bool bc_death = false;
  /// Screening rounds at which this individual was still invited.
  std::uint32_t rounds_invited = 0;

  friend bool operator==(const IndividualRecord&, const IndividualRecord&) = default;
};

/// Mean of a cohort total and its standard error.
struct McMoment {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct McEstimate {
  std::uint64_t individuals = 0;
  double cohort_size = 0.0;
  McMoment life_years;
  McMoment cost;
  McMoment bc_deaths;
};

class Microsimulation {
 public:
  Microsimulation(Policy policy, const EpidemiologyTable& epi, const SurvivalModel& surv,
                  const CostModel& costs);

  IndividualRecord simulate_individual(CounterRng& rng) const;
  IndividualRecord simulate_individual(std::uint64_t seed, std::uint64_t index) const {
    CounterRng rng(seed, index);
    return simulate_individual(rng);
  }

  std::size_t groups() const noexcept { return rounds_.size(); }

 private:
  struct Outcome {
    int t;
    bool bc;
    double cost;
  };
  struct StageOutcomes {
    std::vector<double> cumulative;  // over outcomes, last = total mass
    std::vector<Outcome> outcomes;
  };
  struct Round {
    double screening_cost;
    double incidence;
    std::array<double, kNumDiagnosedStages> stage_cumulative;
    std::array<StageOutcomes, kNumDiagnosedStages> stages;
    double p_die_year0;
    double p_die_year1;
  };

  std::vector<Round> rounds_;
};

/// Scales the per-individual means to the cohort size.
McEstimate estimate(const McConfig& config, const Microsimulation& sim,
                    double cohort_size = 100000.0);

}  // namespace cohortce

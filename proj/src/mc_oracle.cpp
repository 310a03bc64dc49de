#include "cohortce/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "cohortce/error.hpp"
#include "cohortce/model.hpp"

namespace cohortce {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Reduction leaves hold this many consecutive individuals. Fixed so that
// neither batch size nor thread count changes the summation tree.
constexpr std::uint64_t kLeafSize = 1024;

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) noexcept {
    if (a.n == 0.0) return b;
    if (b.n == 0.0) return a;
    Moments r;
    r.n = a.n + b.n;
    const double delta = b.mean - a.mean;
    r.mean = a.mean + delta * (b.n / r.n);
    r.m2 = a.m2 + b.m2 + delta * delta * (a.n * b.n / r.n);
    return r;
  }
};

struct LeafSummary {
  Moments life_years;
  Moments cost;
  Moments bc;
};

LeafSummary merge(const LeafSummary& a, const LeafSummary& b) noexcept {
  return {Moments::merge(a.life_years, b.life_years), Moments::merge(a.cost, b.cost),
          Moments::merge(a.bc, b.bc)};
}

// Pairwise reduction over [lo, hi) with a split that depends only on the
// range.
LeafSummary reduce(const std::vector<LeafSummary>& leaves, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return leaves[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return merge(reduce(leaves, lo, mid), reduce(leaves, mid, hi));
}

McMoment to_total(const Moments& m, double cohort_size) {
  McMoment out;
  out.mean = cohort_size * m.mean;
  if (m.n > 1.0) {
    const double variance = std::max(m.m2, 0.0) / (m.n - 1.0);
    out.standard_error = cohort_size * std::sqrt(variance / m.n);
  }
  return out;
}

std::size_t sample_index(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed) ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Microsimulation::Microsimulation(Policy policy, const EpidemiologyTable& epi,
                                 const SurvivalModel& surv, const CostModel& costs) {
  epi.validate();
  if (policy.h.size() != epi.grid.size() || !(epi.grid == surv.grid())) {
    throw ValidationError("microsimulation inputs use inconsistent age grids");
  }
  rounds_.reserve(epi.grid.size());
  for (std::size_t j = 0; j < epi.grid.size(); ++j) {
    const auto& row = epi.rows[j];
    Round r{};
    r.screening_cost = costs.screening_cost(policy.h[j]);
    r.incidence = row.incidence;
    const StageVector cond = row.effective_cond_stage();
    double acc = 0.0;
    for (std::size_t k = 0; k < kNumDiagnosedStages; ++k) {
      acc += cond[k];
      r.stage_cumulative[k] = acc;
    }
    const std::size_t band = costs.band_index_for_age(epi.grid[j].start_age);
    for (Stage k : kDiagnosedStages) {
      auto& so = r.stages[diagnosed_index(k)];
      const TreatmentCosts& c = costs.costs(band, k);
      double mass = 0.0;
      for (const JointCell& cell : build_pi(surv, j, k)) {
        mass += cell.bc;
        so.cumulative.push_back(mass);
        so.outcomes.push_back({cell.t, true, per_case_cost(c, cell.t, DeathCause::BreastCancer)});
        mass += cell.other;
        so.cumulative.push_back(mass);
        so.outcomes.push_back({cell.t, false, per_case_cost(c, cell.t, DeathCause::OtherCause)});
      }
    }
    const IntervalSplit& split = surv.interval(j);
    r.p_die_year0 = split.p_die_year0;
    r.p_die_year1 = split.p_die_year1;
    rounds_.push_back(std::move(r));
  }
}

IndividualRecord Microsimulation::simulate_individual(CounterRng& rng) const {
  IndividualRecord rec;
  for (std::size_t j = 0; j < rounds_.size(); ++j) {
    const Round& r = rounds_[j];
    ++rec.rounds_invited;
    rec.cost += r.screening_cost;
    if (rng.uniform() < r.incidence) {
      const double u = rng.uniform() * r.stage_cumulative.back();
      std::size_t k = 0;
      while (k + 1 < kNumDiagnosedStages && !(u < r.stage_cumulative[k])) ++k;
      const StageOutcomes& so = r.stages[k];
      const Outcome& o = so.outcomes[sample_index(so.cumulative, rng.uniform())];
      rec.life_years += o.t;
      rec.cost += o.cost;
      rec.bc_death = o.bc;
      return rec;
    }
    const double u = rng.uniform();
    if (u < r.p_die_year0) return rec;
    if (u < r.p_die_year0 + r.p_die_year1) {
      rec.life_years += 1.0;
      return rec;
    }
    // Survivors are credited two years at the next round; there is none
    // after the last group.
    if (j + 1 < rounds_.size()) rec.life_years += kIntervalYears;
  }
  return rec;
}

McEstimate estimate(const McConfig& config, const Microsimulation& sim, double cohort_size) {
  if (config.individuals == 0) throw DomainError("individuals must be >= 1");
  const std::uint64_t leaves = (config.individuals + kLeafSize - 1) / kLeafSize;
  const std::uint64_t leaves_per_batch =
      std::max<std::uint64_t>(1, (std::max<std::uint64_t>(config.batch_size, 1) + kLeafSize - 1) /
                                     kLeafSize);
  std::vector<LeafSummary> summaries(leaves);

  std::atomic<std::uint64_t> next_leaf{0};
  auto work = [&] {
    for (;;) {
      const std::uint64_t first = next_leaf.fetch_add(leaves_per_batch);
      if (first >= leaves) return;
      const std::uint64_t last = std::min(leaves, first + leaves_per_batch);
      for (std::uint64_t leaf = first; leaf < last; ++leaf) {
        LeafSummary s;
        const std::uint64_t begin = leaf * kLeafSize;
        const std::uint64_t end = std::min(config.individuals, begin + kLeafSize);
        for (std::uint64_t i = begin; i < end; ++i) {
          const IndividualRecord rec = sim.simulate_individual(config.seed, i);
          s.life_years.add(rec.life_years);
          s.cost.add(rec.cost);
          s.bc.add(rec.bc_death ? 1.0 : 0.0);
        }
        summaries[leaf] = s;
      }
    }
  };

  unsigned threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  threads = std::max(1u, threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work);
  }

  const LeafSummary total = reduce(summaries, 0, summaries.size());
  McEstimate out;
  out.individuals = config.individuals;
  out.cohort_size = cohort_size;
  out.life_years = to_total(total.life_years, cohort_size);
  out.cost = to_total(total.cost, cohort_size);
  out.bc_deaths = to_total(total.bc, cohort_size);
  return out;
}

}  // namespace cohortce

#include "cohortce/scenario.hpp"

#include <algorithm>
#include <sstream>

#include "cohortce/error.hpp"

namespace cohortce {

namespace {

// Extended target ages.
constexpr int kYoungerFirstAge = 46;
constexpr int kOlderLastAge = 74;
constexpr int kFirstOlderAge = 70;
// Groups whose stage distribution the younger extension reassigns.
constexpr int kYoungerShiftLastAge = 51;

struct Reassignment {
  int target_start;
  int source_start;
  double incidence_multiplier;
};

// First-round effect of starting screening at 46 instead of 50.
constexpr Reassignment kYoungerRules[] = {
    {46, 50, 1.28},
    {48, 52, 1.247},
    {50, 52, 0.881},
};

void check_incidence(const EpidemiologyTable& epi, const char* what) {
  std::vector<std::string> problems;
  for (std::size_t j = 0; j < epi.rows.size(); ++j) {
    const double inc = epi.rows[j].incidence;
    if (!(inc >= 0.0 && inc <= 1.0)) {
      std::ostringstream os;
      os << what << ": age group " << epi.grid[j].label() << " incidence " << inc
         << " outside [0, 1]";
      problems.push_back(os.str());
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

void require_mask(const std::vector<bool>& mask, const EpidemiologyTable& epi) {
  if (mask.size() != epi.rows.size()) throw ValidationError("scope mask does not match age grid");
}

// Copies stage rows from `snapshot` into `target` for the younger groups.
void younger_into(const EpidemiologyTable& snapshot, EpidemiologyTable& target) {
  const AgeGrid& grid = snapshot.grid;
  for (const Reassignment& rule : kYoungerRules) {
    const std::size_t dst = grid.require_index_of_start(rule.target_start);
    const std::size_t src = grid.require_index_of_start(rule.source_start);
    auto& row = target.rows[dst];
    row.cond_stage = snapshot.rows[src].cond_stage;
    row.localized_shift = snapshot.rows[src].localized_shift;
    row.incidence = snapshot.rows[dst].incidence * rule.incidence_multiplier;
  }
}

void older_into(const EpidemiologyTable& snapshot, const OlderIncidence& older_incidence,
                EpidemiologyTable& target) {
  const AgeGrid& grid = snapshot.grid;
  std::vector<std::string> missing;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const int start = grid[j].start_age;
    if (start < kFirstOlderAge) continue;
    auto it = older_incidence.find(start);
    if (it == older_incidence.end()) {
      missing.push_back("older-extension incidence missing for age group " + grid[j].label());
      continue;
    }
    // 70-71 and 72-73 take the stage distribution of 68-69; every later
    // group takes the one of the group four years younger.
    const int source_start = start < kFirstOlderAge + 2 * kIntervalYears ? 68 : start - 4;
    const std::size_t src = grid.require_index_of_start(source_start);
    auto& row = target.rows[j];
    row.cond_stage = snapshot.rows[src].cond_stage;
    row.localized_shift = snapshot.rows[src].localized_shift;
    row.incidence = it->second;
  }
  if (!missing.empty()) {
    std::string msg = missing.front();
    if (missing.size() > 1) msg += " (and " + std::to_string(missing.size() - 1) + " more)";
    throw DataError(msg);
  }
}

}  // namespace

std::string_view extension_name(Extension e) noexcept {
  switch (e) {
    case Extension::None: return "none";
    case Extension::Younger: return "younger";
    case Extension::Older: return "older";
    case Extension::Both: return "both";
  }
  return "none";
}

std::optional<Extension> parse_extension(std::string_view s) noexcept {
  if (s == "none") return Extension::None;
  if (s == "younger") return Extension::Younger;
  if (s == "older") return Extension::Older;
  if (s == "both") return Extension::Both;
  return std::nullopt;
}

std::string_view transform_kind_name(TransformKind k) noexcept {
  switch (k) {
    case TransformKind::IncidenceScale: return "incidence_scale";
    case TransformKind::CostScale: return "cost_scale";
    case TransformKind::StageShift: return "stage_shift";
  }
  return "";
}

std::optional<TransformKind> parse_transform_kind(std::string_view s) noexcept {
  if (s == "incidence_scale") return TransformKind::IncidenceScale;
  if (s == "cost_scale") return TransformKind::CostScale;
  if (s == "stage_shift") return TransformKind::StageShift;
  return std::nullopt;
}

std::vector<bool> resolve_scope(const AgeScope& scope, TransformKind kind, Extension extension,
                                const AgeGrid& grid) {
  std::vector<bool> mask(grid.size(), false);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const int start = grid[j].start_age;
    switch (scope.kind) {
      case AgeScope::Kind::All:
        mask[j] = true;
        break;
      case AgeScope::Kind::Ranges:
        for (const auto& r : scope.ranges) mask[j] = mask[j] || r.contains(start);
        break;
      case AgeScope::Kind::Modelled: {
        const bool younger = extension == Extension::Younger || extension == Extension::Both;
        const bool older = extension == Extension::Older || extension == Extension::Both;
        if (kind == TransformKind::StageShift) {
          mask[j] = (younger && start >= kYoungerFirstAge && start <= kYoungerShiftLastAge) ||
                    (older && start >= kFirstOlderAge);
        } else if (kind == TransformKind::IncidenceScale) {
          if (extension == Extension::Both) {
            mask[j] = true;
          } else {
            mask[j] = (younger && start >= kYoungerFirstAge && start < kFirstOlderAge) ||
                      (older && start >= kFirstOlderAge);
          }
        } else {
          mask[j] = true;
        }
        break;
      }
    }
  }
  return mask;
}

EpidemiologyTable apply_younger_extension(const EpidemiologyTable& base) {
  EpidemiologyTable out = base;
  younger_into(base, out);
  check_incidence(out, "younger extension");
  return out;
}

EpidemiologyTable apply_older_extension(const EpidemiologyTable& base,
                                        const OlderIncidence& older_incidence) {
  EpidemiologyTable out = base;
  older_into(base, older_incidence, out);
  check_incidence(out, "older extension");
  return out;
}

EpidemiologyTable apply_incidence_scale(const SensitivityTransform& t,
                                        const EpidemiologyTable& epi,
                                        const std::vector<bool>& in_scope) {
  if (t.kind != TransformKind::IncidenceScale) throw DomainError("not an incidence transform");
  require_mask(in_scope, epi);
  EpidemiologyTable out = epi;
  for (std::size_t j = 0; j < out.rows.size(); ++j) {
    if (in_scope[j]) out.rows[j].incidence *= 1.0 + t.magnitude;
  }
  check_incidence(out, "incidence scale");
  return out;
}

CostModel apply_cost_scale(const SensitivityTransform& t, const CostModel& costs) {
  if (t.kind != TransformKind::CostScale) throw DomainError("not a cost transform");
  CostModel out = costs;
  const double factor = 1.0 + t.magnitude;
  for (auto& band : out.treatment) {
    for (auto& c : band) {
      c.first_year *= factor;
      c.maintenance_year *= factor;
      c.terminal_year *= factor;
    }
  }
  return out;
}

EpidemiologyTable apply_stage_shift(const SensitivityTransform& t, const EpidemiologyTable& epi,
                                    const std::vector<bool>& in_scope) {
  if (t.kind != TransformKind::StageShift) throw DomainError("not a stage-shift transform");
  require_mask(in_scope, epi);
  EpidemiologyTable out = epi;
  std::vector<std::string> problems;
  for (std::size_t j = 0; j < out.rows.size(); ++j) {
    if (!in_scope[j]) continue;
    auto& row = out.rows[j];
    row.localized_shift += t.magnitude;
    const StageVector s = row.effective_cond_stage();
    if (s[diagnosed_index(Stage::Localized)] < 0.0 || s[diagnosed_index(Stage::Regional)] < 0.0) {
      std::ostringstream os;
      os << "stage shift " << t.magnitude << " drives a stage probability of age group "
         << out.grid[j].label() << " below zero";
      problems.push_back(os.str());
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return out;
}

// ---------------------------------------------------------------------------

Policy scenario_policy(const ScenarioSpec& spec, const AgeGrid& grid) {
  int first = spec.screen_first_age;
  int last = spec.screen_last_age;
  if (spec.extension == Extension::Younger || spec.extension == Extension::Both) {
    first = std::min(first, kYoungerFirstAge);
  }
  if (spec.extension == Extension::Older || spec.extension == Extension::Both) {
    last = std::max(last, kOlderLastAge);
  }
  return make_policy(spec.id, grid, first, last);
}

BuiltScenario build_scenario(const ScenarioSpec& spec, const ScenarioInputs& inputs,
                             const CostModel& costs) {
  const EpidemiologyTable& snapshot = inputs.baseline;
  BuiltScenario out{scenario_policy(spec, snapshot.grid), snapshot, costs};

  const bool younger = spec.extension == Extension::Younger || spec.extension == Extension::Both;
  const bool older = spec.extension == Extension::Older || spec.extension == Extension::Both;
  if (younger) younger_into(snapshot, out.epi);
  if (older) {
    const OlderIncidence* source = nullptr;
    if (spec.extension == Extension::Both && inputs.both_older_incidence) {
      source = &*inputs.both_older_incidence;
    } else if (inputs.older_incidence) {
      source = &*inputs.older_incidence;
    }
    if (source == nullptr) {
      throw DataError("scenario " + spec.id + " extends to older ages but no older incidence "
                      "is loaded");
    }
    older_into(snapshot, *source, out.epi);
  }
  check_incidence(out.epi, "extension");

  for (const SensitivityTransform& t : spec.transforms) {
    const auto mask = resolve_scope(t.scope, t.kind, spec.extension, out.epi.grid);
    switch (t.kind) {
      case TransformKind::IncidenceScale:
        out.epi = apply_incidence_scale(t, out.epi, mask);
        break;
      case TransformKind::CostScale:
        out.costs = apply_cost_scale(t, out.costs);
        break;
      case TransformKind::StageShift:
        out.epi = apply_stage_shift(t, out.epi, mask);
        break;
    }
  }
  out.epi.validate();
  out.costs.validate(out.epi.grid);
  return out;
}

}  // namespace cohortce

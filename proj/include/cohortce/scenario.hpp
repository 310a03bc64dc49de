#pragma once

// Screening-age extensions and one-way sensitivity transforms. Every
// operation returns a new table; survival data is never an input.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cohortce/types.hpp"

namespace cohortce {

enum class Extension { None, Younger, Older, Both };

enum class TransformKind { IncidenceScale, CostScale, StageShift };

std::string_view extension_name(Extension e) noexcept;
std::optional<Extension> parse_extension(std::string_view s) noexcept;
std::string_view transform_kind_name(TransformKind k) noexcept;
std::optional<TransformKind> parse_transform_kind(std::string_view s) noexcept;

/// Which age groups a transform touches. `Modelled` resolves against the
/// scenario's extension (the newly screened groups).
struct AgeScope {
  enum class Kind { Modelled, All, Ranges };
  Kind kind = Kind::Modelled;
  std::vector<AgeBand> ranges;  // matched on group start age

  friend bool operator==(const AgeScope&, const AgeScope&) = default;
};

struct SensitivityTransform {
  TransformKind kind = TransformKind::IncidenceScale;
  /// Relative change for the scale kinds, absolute probability moved from
  /// Regional to Localized for StageShift.
  double magnitude = 0.0;
  AgeScope scope;

  friend bool operator==(const SensitivityTransform&, const SensitivityTransform&) = default;
};

/// Per-group mask for a scope under a given extension.
std::vector<bool> resolve_scope(const AgeScope& scope, TransformKind kind, Extension extension,
                                const AgeGrid& grid);

/// Incidence per older age group (start age >= 70), keyed by start age.
using OlderIncidence = std::map<int, double>;

EpidemiologyTable apply_younger_extension(const EpidemiologyTable& base);
EpidemiologyTable apply_older_extension(const EpidemiologyTable& base,
                                        const OlderIncidence& older_incidence);

EpidemiologyTable apply_incidence_scale(const SensitivityTransform& t,
                                        const EpidemiologyTable& epi,
                                        const std::vector<bool>& in_scope);
CostModel apply_cost_scale(const SensitivityTransform& t, const CostModel& costs);
EpidemiologyTable apply_stage_shift(const SensitivityTransform& t, const EpidemiologyTable& epi,
                                    const std::vector<bool>& in_scope);

// ---------------------------------------------------------------------------

struct ScenarioSpec {
  std::string id;
  std::string label;
  /// Screened start ages before any extension, inclusive.
  int screen_first_age = 50;
  int screen_last_age = 69;
  Extension extension = Extension::None;
  std::vector<SensitivityTransform> transforms;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Data a scenario may draw on. `baseline` is the current-policy table.
struct ScenarioInputs {
  EpidemiologyTable baseline;
  std::optional<OlderIncidence> older_incidence;
  /// Older-group incidence when both directions are extended; falls back to
  /// older_incidence when absent.
  std::optional<OlderIncidence> both_older_incidence;
};

struct BuiltScenario {
  Policy policy;
  EpidemiologyTable epi;
  CostModel costs;
};

/// The screening policy implied by the spec's range and extension.
Policy scenario_policy(const ScenarioSpec& spec, const AgeGrid& grid);

/// Extension first (reading only the baseline snapshot), then transforms in
/// listed order.
BuiltScenario build_scenario(const ScenarioSpec& spec, const ScenarioInputs& inputs,
                             const CostModel& costs);

}  // namespace cohortce

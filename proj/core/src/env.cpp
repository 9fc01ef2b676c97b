#include "ave/env.hpp"

#include <array>
#include <utility>

namespace ave {
namespace {

constexpr std::array<std::pair<std::string_view, FeatureSelector>, 5> kSelectors{{
    {"position", FeatureSelector::position},
    {"human-cell", FeatureSelector::human_cell},
    {"phase", FeatureSelector::phase},
    {"phase-embedding", FeatureSelector::phase_embedding},
    {"full", FeatureSelector::full},
}};

}  // namespace

std::string_view to_string(OutcomeLabel label) {
  switch (label) {
    case OutcomeLabel::none: return "none";
    case OutcomeLabel::success: return "success";
    case OutcomeLabel::missed_goal: return "missed_goal";
    case OutcomeLabel::crash: return "crash";
    case OutcomeLabel::timeout: return "timeout";
    case OutcomeLabel::out_of_bounds: return "out_of_bounds";
  }
  return "none";
}

FeatureSelector parse_feature_selector(std::string_view name) {
  for (const auto& [key, value] : kSelectors)
    if (key == name) return value;
  throw ConfigError("unknown feature selector '" + std::string(name) + "'");
}

std::string_view to_string(FeatureSelector selector) {
  for (const auto& [key, value] : kSelectors)
    if (value == selector) return key;
  return "?";
}

}  // namespace ave

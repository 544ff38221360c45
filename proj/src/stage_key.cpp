#include "xrreq/stage_key.hpp"

#include <fmt/format.h>

#include "xrreq/errors.hpp"

namespace xrreq {

Interaction parse_interaction(std::string_view text) {
  if (text == "weak_2d") return Interaction::kWeak2d;
  if (text == "weak_3d") return Interaction::kWeak3d;
  if (text == "weak") return Interaction::kWeak;
  if (text == "strong") return Interaction::kStrong;
  if (text == "any" || text.empty()) return Interaction::kAny;
  throw DomainError(fmt::format("unknown interaction '{}' (weak_2d|weak_3d|weak|strong|any)", text));
}

std::string_view to_string(Interaction interaction) {
  switch (interaction) {
    case Interaction::kWeak2d:
      return "weak_2d";
    case Interaction::kWeak3d:
      return "weak_3d";
    case Interaction::kWeak:
      return "weak";
    case Interaction::kStrong:
      return "strong";
    case Interaction::kAny:
      return "any";
  }
  return "any";
}

std::string StageKey::to_string() const {
  return fmt::format("{}/{}/{}", taxonomy, stage, xrreq::to_string(interaction));
}

StageKey StageKey::parse(std::string_view text) {
  const auto first = text.find('/');
  if (first == std::string_view::npos) {
    throw DomainError(fmt::format("stage key '{}' must look like taxonomy/stage[/interaction]", text));
  }
  StageKey key;
  key.taxonomy = std::string(text.substr(0, first));
  const auto rest = text.substr(first + 1);
  const auto second = rest.find('/');
  key.stage = std::string(rest.substr(0, second));
  if (second != std::string_view::npos) key.interaction = parse_interaction(rest.substr(second + 1));
  if (key.taxonomy.empty() || key.stage.empty()) {
    throw DomainError(fmt::format("stage key '{}' has an empty component", text));
  }
  return key;
}

}  // namespace xrreq

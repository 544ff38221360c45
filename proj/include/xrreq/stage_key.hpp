#pragma once

#include <string>
#include <string_view>

namespace xrreq {

// How the service reacts to the user. `kWeak` applies to both weak
// variants; `kAny` marks registry entries that do not distinguish.
enum class Interaction { kWeak2d, kWeak3d, kWeak, kStrong, kAny };

Interaction parse_interaction(std::string_view text);
std::string_view to_string(Interaction interaction);

// Identifies one row of a published evolution-stage taxonomy, e.g.
// {"mangiante", "extreme", kStrong}.
struct StageKey {
  std::string taxonomy;
  std::string stage;
  Interaction interaction = Interaction::kAny;

  std::string to_string() const;
  // "taxonomy/stage/interaction"; the interaction part is optional.
  static StageKey parse(std::string_view text);
};

}  // namespace xrreq

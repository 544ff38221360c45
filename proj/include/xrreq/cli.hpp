#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xrreq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming an extra profiles file.
inline constexpr const char* kProfilesEnv = "XRREQ_PROFILES";

// `args` excludes the program name. Data goes to `out`, diagnostics and
// usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xrreq::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "xrreq/profiles.hpp"
#include "xrreq/units.hpp"

// Multi-profile requirement reports for documentation and regression
// fixtures. Every cell is computed through the capacity, latency and
// reliability models.
namespace xrreq::report {

struct ReportOptions {
  std::vector<double> factors{1.0, 20.0, 600.0};
};

struct RequirementsReport {
  std::vector<double> factors;
  std::vector<profiles::RequirementsColumn> rows;
};

// Keys are device names with an optional "@<hz>" refresh mode, e.g.
// "quest2@72". Rows keep the order of `keys`.
RequirementsReport requirements_report(const profiles::Registry& registry,
                                       const std::vector<std::string>& keys,
                                       const ReportOptions& options = {});

void write_json(std::ostream& out, const RequirementsReport& report, PrefixMode mode);
void write_csv(std::ostream& out, const RequirementsReport& report, PrefixMode mode);

}  // namespace xrreq::report

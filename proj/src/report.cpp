#include "xrreq/report.hpp"

#include <charconv>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "xrreq/errors.hpp"

namespace xrreq::report {
namespace {

using nlohmann::json;

std::pair<std::string, std::optional<double>> split_key(const std::string& key) {
  const auto at = key.find('@');
  if (at == std::string::npos) return {key, std::nullopt};
  const std::string_view hz_text = std::string_view(key).substr(at + 1);
  double hz = 0.0;
  const auto [ptr, ec] = std::from_chars(hz_text.data(), hz_text.data() + hz_text.size(), hz);
  if (ec != std::errc{} || ptr != hz_text.data() + hz_text.size() || hz_text.empty()) {
    throw DomainError(fmt::format("bad refresh rate in profile key '{}' (expected name@hz)", key));
  }
  return {key.substr(0, at), hz};
}

json resolution_json(const Resolution& r) { return json{{"width", r.width}, {"height", r.height}}; }

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string optional_text(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

std::string factor_label(double f) { return fmt::format("{}", f); }

}  // namespace

RequirementsReport requirements_report(const profiles::Registry& registry, const std::vector<std::string>& keys,
                                       const ReportOptions& options) {
  RequirementsReport report;
  report.factors = options.factors;
  for (const auto& key : keys) {
    const auto [name, hz] = split_key(key);
    report.rows.push_back(profiles::compute_requirements(registry, registry.device(name), hz, options.factors));
  }
  return report;
}

void write_json(std::ostream& out, const RequirementsReport& report, PrefixMode mode) {
  json doc{{"units", std::string(to_string(mode))}, {"factors", report.factors}, {"rows", json::array()}};
  for (const auto& c : report.rows) {
    json rates = json::array();
    for (const auto& [factor, rate] : c.bitrates) {
      rates.push_back({{"factor", factor}, {"bps", rate.bits_per_second}, {"formatted", format_bitrate(rate, mode)}});
    }
    doc["rows"].push_back({{"device", c.device},
                           {"refresh_hz", c.refresh_hz},
                           {"full_view", resolution_json(c.full_view)},
                           {"single_eye", resolution_json(c.single_eye)},
                           {"fov", {{"horizontal", c.fov.horizontal.degrees}, {"vertical", c.fov.vertical.degrees}}},
                           {"bpc", c.bpc},
                           {"bpp", c.bpp},
                           {"ppd", c.ppd},
                           {"bitrates", rates},
                           {"mtp_limit_ms", optional_json(c.mtp_limit_ms)},
                           {"loss_rate_raw", optional_json(c.loss_rate_raw)},
                           {"loss_rate", optional_json(c.loss_rate)},
                           {"delivery_percent", optional_json(c.delivery_percent)}});
  }
  out << doc.dump(2) << '\n';
}

void write_csv(std::ostream& out, const RequirementsReport& report, PrefixMode mode) {
  out << "device,refresh_hz,full_view,single_eye,fov,bpc,bpp,ppd";
  for (const double f : report.factors) {
    out << fmt::format(",bitrate_{}_bps,bitrate_{}", factor_label(f), factor_label(f));
  }
  out << ",mtp_limit_ms,loss_rate,delivery_percent\n";
  for (const auto& c : report.rows) {
    out << fmt::format("{},{},{}x{},{}x{},{}x{},{},{},{}", c.device, c.refresh_hz, c.full_view.width,
                       c.full_view.height, c.single_eye.width, c.single_eye.height, c.fov.horizontal.degrees,
                       c.fov.vertical.degrees, c.bpc, c.bpp, c.ppd);
    for (const auto& [factor, rate] : c.bitrates) {
      out << fmt::format(",{},{}", rate.bits_per_second, format_bitrate(rate, mode));
    }
    out << fmt::format(",{},{},{}\n", optional_text(c.mtp_limit_ms), optional_text(c.loss_rate),
                       c.delivery_percent ? format_percent(*c.delivery_percent) : std::string());
  }
}

}  // namespace xrreq::report

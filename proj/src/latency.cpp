#include "xrreq/latency.hpp"

#include <cmath>

#include <fmt/format.h>

#include "xrreq/errors.hpp"
#include "xrreq/profiles.hpp"

namespace xrreq::latency {
namespace {

void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0)) throw DomainError(fmt::format("{} must be non-negative (got {})", what, v));
}

// Absorbs the rounding in t / period when t sits on a tick.
constexpr double kTickSlack = 1e-9;

}  // namespace

void PipelineTiming::validate() const {
  require_non_negative(t_sense, "sensing delay");
  require_non_negative(t_render, "render delay");
  require_non_negative(t_encode, "encode delay");
  require_non_negative(t_decode, "decode delay");
  require_non_negative(fixed_display, "display response delay");
}

RefreshDelay refresh_delay(double refresh_hz) {
  if (!(refresh_hz > 0.0)) throw DomainError("refresh rate must be positive");
  const double max_ms = 1000.0 / refresh_hz;
  return {max_ms, max_ms / 2.0};
}

double next_vsync_wait(double ready_ms, double refresh_hz) {
  if (!(refresh_hz > 0.0)) throw DomainError("refresh rate must be positive");
  const double period = 1000.0 / refresh_hz;
  const double tick = std::max(0.0, std::ceil(ready_ms / period - kTickSlack));
  return std::max(0.0, tick * period - ready_ms);
}

double stream_latency(double t_encode, double frame_bits, BitRate throughput, double t_decode) {
  require_non_negative(t_encode, "encode delay");
  require_non_negative(t_decode, "decode delay");
  require_non_negative(frame_bits, "frame size");
  if (!(throughput.bits_per_second > 0.0)) throw DomainError("throughput must be positive");
  return t_encode + 1000.0 * frame_bits / throughput.bits_per_second + t_decode;
}

double e2e_latency(const PipelineTiming& timing, double stream_ms, double display_ms) {
  timing.validate();
  require_non_negative(stream_ms, "stream delay");
  require_non_negative(display_ms, "display delay");
  return timing.t_sense + timing.t_render + stream_ms + display_ms;
}

double display_latency(const PipelineTiming& timing, double refresh_hz, VsyncMode mode) {
  const RefreshDelay r = refresh_delay(refresh_hz);
  return timing.fixed_display + (mode == VsyncMode::kMax ? r.max_ms : r.avg_ms);
}

BudgetResult budget_check(const LatencyBudget& budget) {
  if (!(budget.mtp_limit > 0.0)) throw DomainError("MTP limit must be positive");
  budget.components.validate();
  require_non_negative(budget.comm_ul, "uplink delay");
  require_non_negative(budget.comm_dl, "downlink delay");

  BudgetResult result;
  auto add = [&](const char* name, double ms) {
    result.breakdown.push_back({name, ms, ms / budget.mtp_limit});
  };
  const PipelineTiming& c = budget.components;
  add("sense", c.t_sense);
  add("render", c.t_render);
  add("encode", c.t_encode);
  add("uplink", budget.comm_ul);
  add("downlink", budget.comm_dl);
  add("decode", c.t_decode);
  add("display", c.fixed_display);
  if (budget.refresh_hz) {
    const RefreshDelay r = refresh_delay(*budget.refresh_hz);
    add("refresh", budget.vsync == VsyncMode::kMax ? r.max_ms : r.avg_ms);
  }

  double total = 0.0;
  for (const auto& line : result.breakdown) total += line.ms;
  result.remaining_ms = budget.mtp_limit - total;
  result.violated = result.remaining_ms < 0.0;
  return result;
}

double mtp_limit_for(const profiles::Registry& registry, const StageKey& key) {
  return registry.mtp_limit(key);
}

}  // namespace xrreq::latency

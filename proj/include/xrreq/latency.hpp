#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xrreq/stage_key.hpp"
#include "xrreq/types.hpp"

namespace xrreq::profiles {
class Registry;
}

// Motion-to-photon (MTP) latency: decomposition, VSync waits and budget
// checks against stage-dependent limits. All times are milliseconds.
namespace xrreq::latency {

// Per-frame pipeline delays. `fixed_display` is the non-refresh part of
// the display delay (pixel/screen response).
struct PipelineTiming {
  double t_sense = 0.0;
  double t_render = 0.0;
  double t_encode = 0.0;
  double t_decode = 0.0;
  double fixed_display = 0.0;

  void validate() const;
  double sum() const { return t_sense + t_render + t_encode + t_decode + fixed_display; }
};

struct RefreshDelay {
  double max_ms = 0.0;
  double avg_ms = 0.0;
};

RefreshDelay refresh_delay(double refresh_hz);

enum class VsyncMode { kMax, kAverage };

// Wait until the next VSync tick at or after `ready_ms`, ticks being at
// k * 1000 / refresh_hz.
double next_vsync_wait(double ready_ms, double refresh_hz);

// Encode + transmission + decode.
double stream_latency(double t_encode, double frame_bits, BitRate throughput, double t_decode);

double e2e_latency(const PipelineTiming& timing, double stream_ms, double display_ms);

// fixed_display plus a max or average refresh wait.
double display_latency(const PipelineTiming& timing, double refresh_hz, VsyncMode mode);

struct LatencyBudget {
  double mtp_limit = 20.0;
  PipelineTiming components;
  double comm_ul = 0.0;
  double comm_dl = 0.0;
  // When set, a refresh wait is charged as its own component.
  std::optional<double> refresh_hz;
  VsyncMode vsync = VsyncMode::kAverage;
};

struct BudgetLine {
  std::string component;
  double ms = 0.0;
  double share = 0.0;  // ms / mtp_limit
};

struct BudgetResult {
  double remaining_ms = 0.0;
  bool violated = false;
  std::vector<BudgetLine> breakdown;
};

BudgetResult budget_check(const LatencyBudget& budget);

// Registered MTP limit; LookupError (listing valid keys) otherwise.
double mtp_limit_for(const profiles::Registry& registry, const StageKey& key);

}  // namespace xrreq::latency

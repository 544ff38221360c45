#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "xrreq/codec.hpp"
#include "xrreq/latency.hpp"
#include "xrreq/tracegen.hpp"

// Discrete-event playback of a frame trace over one downlink through the
// MTP pipeline: uplink pose -> render/encode at the edge -> FIFO
// serialization on the downlink -> decode -> VSync-aligned display.
namespace xrreq::netsim {

enum class TransportMode { kUdpLike, kTcpLike };

struct LinkModel {
  // +infinity is allowed and means zero serialization time.
  double downlink_bps = 100e6;
  double uplink_bps = 10e6;
  double propagation_rtt_ms = 0.0;
  double loss_prob = 0.0;
  std::uint64_t seed = 1;
  TransportMode mode = TransportMode::kUdpLike;
  int max_retx = 3;
  // Pose messages are zero-size unless set.
  double uplink_payload_bits = 0.0;
  std::int64_t mtu_payload_bits = 1460 * 8;

  void validate() const;
};

// Loss draw for one transmission attempt of one packet. Keyed by indices
// so that timing changes never perturb the random stream.
double loss_draw(std::uint64_t seed, std::int64_t frame_index, std::int64_t packet_index, int attempt);

struct FrameResult {
  std::int64_t frame_index = 0;
  codec::FrameType frame_type = codec::FrameType::kI;
  std::int64_t size_bits = 0;
  double t_gen_ms = 0.0;
  double tx_start_ms = 0.0;
  double tx_end_ms = 0.0;
  bool displayed = false;
  // Only meaningful when displayed.
  double ready_ms = 0.0;
  double display_ms = 0.0;
  std::int64_t vsync_tick = 0;
  double vsync_wait_ms = 0.0;
  double e2e_ms = 0.0;
  int retx_count = 0;

  friend bool operator==(const FrameResult&, const FrameResult&) = default;
};

struct Aggregates {
  double mean_e2e_ms = 0.0;
  double p50_e2e_ms = 0.0;
  double p95_e2e_ms = 0.0;
  double p99_e2e_ms = 0.0;
  double max_e2e_ms = 0.0;
  std::int64_t displayed_count = 0;
  std::int64_t dropped_count = 0;
  std::int64_t mtp_violations = 0;
  double effective_fps = 0.0;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

struct SimReport {
  double refresh_hz = 0.0;
  double mtp_limit_ms = 0.0;
  std::vector<FrameResult> frames;
  Aggregates aggregates;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

SimReport simulate(const tracegen::FrameTrace& trace, const LinkModel& link,
                   const latency::PipelineTiming& timing, double refresh_hz, double mtp_limit_ms);

// Per-frame rows plus an aggregate block.
void write_report_json(std::ostream& out, const SimReport& report);
void write_report_csv(std::ostream& out, const SimReport& report);

inline constexpr std::string_view kReportCsvHeader =
    "frame_index,frame_type,size_bits,t_gen_ms,displayed,ready_ms,display_ms,vsync_wait_ms,e2e_ms,retx_count";

}  // namespace xrreq::netsim

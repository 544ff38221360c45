#include "xrreq/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <queue>

#include <fmt/format.h>
#include <json.hpp>

#include "xrreq/errors.hpp"

namespace xrreq::netsim {
namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Absorbs the rounding in t / period when t sits on a tick.
constexpr double kTickSlack = 1e-9;

enum class EventKind { kGenerate, kEdgeReady, kTxDone, kReady };

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kGenerate;
  std::size_t frame = 0;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct Transmission {
  double end_ms = 0.0;
  bool delivered = true;
  int retx = 0;
};

double serialization_ms(double bits, double bps) { return std::isinf(bps) ? 0.0 : 1000.0 * bits / bps; }

// Round-based ARQ: round r sends every packet still missing, back to
// back; the sender learns the outcome one RTT after the round ends.
Transmission transmit(const std::vector<tracegen::PacketRecord>& packets, std::size_t first, std::size_t count,
                      double start_ms, const LinkModel& link) {
  Transmission t;
  std::vector<std::size_t> pending(count);
  for (std::size_t k = 0; k < count; ++k) pending[k] = first + k;
  double clock = start_ms;
  for (int attempt = 0;; ++attempt) {
    double bits = 0.0;
    std::vector<std::size_t> lost;
    for (const std::size_t idx : pending) {
      const auto& p = packets[idx];
      bits += static_cast<double>(p.size_bits);
      if (link.loss_prob > 0.0 && loss_draw(link.seed, p.frame_index, p.packet_index, attempt) < link.loss_prob) {
        lost.push_back(idx);
      }
    }
    clock += serialization_ms(bits, link.downlink_bps);
    t.end_ms = clock;
    if (lost.empty()) return t;
    if (link.mode == TransportMode::kUdpLike || attempt >= link.max_retx) {
      t.delivered = false;
      return t;
    }
    clock += link.propagation_rtt_ms;
    t.retx += static_cast<int>(lost.size());
    pending = std::move(lost);
  }
}

double nearest_rank(const std::vector<double>& sorted, double pct) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

void LinkModel::validate() const {
  if (!(downlink_bps > 0.0)) throw DomainError("downlink rate must be positive");
  if (!(uplink_bps > 0.0)) throw DomainError("uplink rate must be positive");
  if (!(propagation_rtt_ms >= 0.0) || std::isinf(propagation_rtt_ms)) {
    throw DomainError("propagation RTT must be finite and non-negative");
  }
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) throw DomainError("loss probability must lie in [0, 1]");
  if (max_retx < 0) throw DomainError("max_retx must be non-negative");
  if (!(uplink_payload_bits >= 0.0)) throw DomainError("uplink payload must be non-negative");
  if (mtu_payload_bits <= 0) throw DomainError("MTU payload must be positive");
}

double loss_draw(std::uint64_t seed, std::int64_t frame_index, std::int64_t packet_index, int attempt) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(frame_index));
  h = splitmix64(h ^ static_cast<std::uint64_t>(packet_index));
  h = splitmix64(h ^ static_cast<std::uint64_t>(attempt));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

SimReport simulate(const tracegen::FrameTrace& trace, const LinkModel& link, const latency::PipelineTiming& timing,
                   double refresh_hz, double mtp_limit_ms) {
  if (trace.records.empty()) throw DomainError("cannot simulate an empty trace");
  link.validate();
  timing.validate();
  if (!(refresh_hz > 0.0)) throw DomainError("refresh rate must be positive");
  if (!(mtp_limit_ms > 0.0)) throw DomainError("MTP limit must be positive");

  const auto packets = tracegen::packetize(trace, link.mtu_payload_bits);
  const std::size_t n = trace.records.size();
  std::vector<std::size_t> first_packet(n, 0), packet_count(n, 0);
  {
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < n; ++i) {
      first_packet[i] = cursor;
      while (cursor < packets.size() && packets[cursor].frame_index == trace.records[i].index) ++cursor;
      packet_count[i] = cursor - first_packet[i];
    }
  }

  const double half_rtt = link.propagation_rtt_ms / 2.0;
  const double uplink_ms = serialization_ms(link.uplink_payload_bits, link.uplink_bps);
  const double period = 1000.0 / refresh_hz;

  SimReport report;
  report.refresh_hz = refresh_hz;
  report.mtp_limit_ms = mtp_limit_ms;
  report.frames.resize(n);

  std::priority_queue<Event, std::vector<Event>, Later> events;
  std::uint64_t seq = 0;
  auto schedule = [&](double time, EventKind kind, std::size_t frame) { events.push({time, seq++, kind, frame}); };

  std::deque<std::size_t> fifo;
  bool link_busy = false;
  std::vector<Transmission> outcome(n);

  auto start_next = [&](double now) {
    if (link_busy || fifo.empty()) return;
    const std::size_t i = fifo.front();
    fifo.pop_front();
    link_busy = true;
    report.frames[i].tx_start_ms = now;
    outcome[i] = transmit(packets, first_packet[i], packet_count[i], now, link);
    schedule(outcome[i].end_ms, EventKind::kTxDone, i);
  };

  for (std::size_t i = 0; i < n; ++i) schedule(trace.records[i].t_gen_ms, EventKind::kGenerate, i);

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    FrameResult& fr = report.frames[ev.frame];
    switch (ev.kind) {
      case EventKind::kGenerate: {
        const auto& rec = trace.records[ev.frame];
        fr.frame_index = rec.index;
        fr.frame_type = rec.frame_type;
        fr.size_bits = rec.size_bits;
        fr.t_gen_ms = rec.t_gen_ms;
        const double pose_at_edge = ev.time + timing.t_sense + half_rtt + uplink_ms;
        schedule(pose_at_edge + timing.t_render + timing.t_encode, EventKind::kEdgeReady, ev.frame);
        break;
      }
      case EventKind::kEdgeReady:
        fifo.push_back(ev.frame);
        start_next(ev.time);
        break;
      case EventKind::kTxDone: {
        const Transmission& t = outcome[ev.frame];
        fr.tx_end_ms = t.end_ms;
        fr.retx_count = t.retx;
        link_busy = false;
        if (t.delivered) schedule(t.end_ms + half_rtt + timing.t_decode + timing.fixed_display, EventKind::kReady, ev.frame);
        start_next(ev.time);
        break;
      }
      case EventKind::kReady: {
        fr.displayed = true;
        fr.ready_ms = ev.time;
        fr.vsync_tick = static_cast<std::int64_t>(std::max(0.0, std::ceil(ev.time / period - kTickSlack)));
        fr.display_ms = static_cast<double>(fr.vsync_tick) * 1000.0 / refresh_hz;
        fr.vsync_wait_ms = std::max(0.0, fr.display_ms - fr.ready_ms);
        fr.e2e_ms = fr.display_ms - fr.t_gen_ms;
        break;
      }
    }
  }

  Aggregates& agg = report.aggregates;
  std::vector<double> e2e;
  e2e.reserve(n);
  double sum = 0.0;
  for (const auto& f : report.frames) {
    if (!f.displayed) {
      ++agg.dropped_count;
      continue;
    }
    ++agg.displayed_count;
    e2e.push_back(f.e2e_ms);
    sum += f.e2e_ms;
    if (f.e2e_ms > mtp_limit_ms) ++agg.mtp_violations;
  }
  std::sort(e2e.begin(), e2e.end());
  if (!e2e.empty()) {
    agg.mean_e2e_ms = sum / static_cast<double>(e2e.size());
    agg.p50_e2e_ms = nearest_rank(e2e, 50.0);
    agg.p95_e2e_ms = nearest_rank(e2e, 95.0);
    agg.p99_e2e_ms = nearest_rank(e2e, 99.0);
    agg.max_e2e_ms = e2e.back();
  }
  const double duration_s =
      trace.duration_s > 0.0 ? trace.duration_s : static_cast<double>(n) / trace.config.fps;
  agg.effective_fps = static_cast<double>(agg.displayed_count) / duration_s;
  return report;
}

void write_report_json(std::ostream& out, const SimReport& report) {
  const Aggregates& a = report.aggregates;
  json doc{{"refresh_hz", report.refresh_hz},
           {"mtp_limit_ms", report.mtp_limit_ms},
           {"aggregates",
            {{"mean_e2e_ms", a.mean_e2e_ms},
             {"p50_e2e_ms", a.p50_e2e_ms},
             {"p95_e2e_ms", a.p95_e2e_ms},
             {"p99_e2e_ms", a.p99_e2e_ms},
             {"max_e2e_ms", a.max_e2e_ms},
             {"displayed_count", a.displayed_count},
             {"dropped_count", a.dropped_count},
             {"mtp_violations", a.mtp_violations},
             {"effective_fps", a.effective_fps}}},
           {"frames", json::array()}};
  for (const auto& f : report.frames) {
    json row{{"frame_index", f.frame_index},
             {"frame_type", std::string(1, codec::to_char(f.frame_type))},
             {"size_bits", f.size_bits},
             {"t_gen_ms", f.t_gen_ms},
             {"tx_start_ms", f.tx_start_ms},
             {"tx_end_ms", f.tx_end_ms},
             {"displayed", f.displayed},
             {"retx_count", f.retx_count}};
    if (f.displayed) {
      row["ready_ms"] = f.ready_ms;
      row["display_ms"] = f.display_ms;
      row["vsync_tick"] = f.vsync_tick;
      row["vsync_wait_ms"] = f.vsync_wait_ms;
      row["e2e_ms"] = f.e2e_ms;
    }
    doc["frames"].push_back(std::move(row));
  }
  out << doc.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const SimReport& report) {
  out << kReportCsvHeader << '\n';
  for (const auto& f : report.frames) {
    if (f.displayed) {
      out << fmt::format("{},{},{},{},1,{},{},{},{},{}\n", f.frame_index, codec::to_char(f.frame_type), f.size_bits,
                         f.t_gen_ms, f.ready_ms, f.display_ms, f.vsync_wait_ms, f.e2e_ms, f.retx_count);
    } else {
      out << fmt::format("{},{},{},{},0,,,,,{}\n", f.frame_index, codec::to_char(f.frame_type), f.size_bits,
                         f.t_gen_ms, f.retx_count);
    }
  }
  const Aggregates& a = report.aggregates;
  out << "\nmetric,value\n";
  out << fmt::format("mean_e2e_ms,{}\np50_e2e_ms,{}\np95_e2e_ms,{}\np99_e2e_ms,{}\nmax_e2e_ms,{}\n", a.mean_e2e_ms,
                     a.p50_e2e_ms, a.p95_e2e_ms, a.p99_e2e_ms, a.max_e2e_ms);
  out << fmt::format("displayed_count,{}\ndropped_count,{}\nmtp_violations,{}\neffective_fps,{}\n", a.displayed_count,
                     a.dropped_count, a.mtp_violations, a.effective_fps);
}

}  // namespace xrreq::netsim

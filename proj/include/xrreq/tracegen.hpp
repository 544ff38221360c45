#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "xrreq/codec.hpp"

// Deterministic per-frame and per-packet traffic traces built from the
// codec model, with CSV/JSON export and import.
namespace xrreq::tracegen {

using codec::FrameType;

struct FrameRecord {
  std::int64_t index = 0;
  double t_gen_ms = 0.0;
  FrameType frame_type = FrameType::kI;
  std::int64_t size_bits = 0;
  std::int64_t gop_index = 0;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct PacketRecord {
  std::int64_t frame_index = 0;
  std::int64_t packet_index = 0;
  std::int64_t size_bits = 0;
  double t_ready_ms = 0.0;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct FrameTrace {
  codec::GopConfig config;
  codec::FrameSizes sizes;
  double duration_s = 0.0;
  std::vector<FrameRecord> records;
};

struct TraceOptions {
  // Multiplicative size jitter, uniform in [1 - jitter, 1 + jitter]. Off
  // by default; sizes are analytic.
  double jitter = 0.0;
  std::uint64_t seed = 0;
};

// Each frame carries its type's size inflated by (1 + redundancy).
FrameTrace generate_trace(const codec::FrameSizes& sizes, const codec::GopConfig& cfg, double duration_s,
                          const TraceOptions& options = {});

std::vector<PacketRecord> packetize(const FrameTrace& trace, std::int64_t mtu_payload_bits);

enum class Format { kCsv, kJson };
Format parse_format(std::string_view text);

inline constexpr std::string_view kFrameCsvHeader = "frame_index,t_gen_ms,frame_type,size_bits,gop_index";
inline constexpr std::string_view kPacketCsvHeader = "frame_index,packet_index,size_bits,t_ready_ms";

void write_frames(std::ostream& out, const FrameTrace& trace, Format format);
void write_packets(std::ostream& out, const std::vector<PacketRecord>& packets, Format format);

// File variants; IoError carries the path.
void export_frames(const std::filesystem::path& path, const FrameTrace& trace, Format format);
void export_packets(const std::filesystem::path& path, const std::vector<PacketRecord>& packets,
                    Format format);

// CSV times carry three decimals, so CSV imports are exact for every
// field except t_gen_ms, which comes back rounded to the microsecond.
// JSON imports are exact and restore the config snapshot.
FrameTrace read_frames(std::istream& in, Format format);
std::vector<PacketRecord> read_packets(std::istream& in, Format format);
FrameTrace import_frames(const std::filesystem::path& path);
std::vector<PacketRecord> import_packets(const std::filesystem::path& path);

}  // namespace xrreq::tracegen

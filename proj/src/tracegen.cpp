#include "xrreq/tracegen.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "xrreq/errors.hpp"

namespace xrreq::tracegen {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view text, std::string_view field, int line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(fmt::format("line {}: bad {} '{}'", line, field, text), std::string(field), line);
  }
  return value;
}

// Reads the header and the data rows, checking the column layout.
std::vector<std::pair<int, std::vector<std::string_view>>> read_rows(std::istream& in, std::string_view header,
                                                                     std::vector<std::string>& storage) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ParseError(fmt::format("line 1: expected header '{}'", header), "header", 1);
  }
  const std::size_t columns = split_csv(header).size();
  int line_no = 1;
  std::vector<std::pair<int, std::string>> raw;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    raw.emplace_back(line_no, line);
  }
  storage.clear();
  storage.reserve(raw.size());
  std::vector<std::pair<int, std::vector<std::string_view>>> rows;
  for (auto& [no, text] : raw) {
    storage.push_back(std::move(text));
    auto fields = split_csv(storage.back());
    if (fields.size() != columns) {
      throw ParseError(fmt::format("line {}: expected {} columns, got {}", no, columns, fields.size()), "row", no);
    }
    rows.emplace_back(no, std::move(fields));
  }
  return rows;
}

json frame_to_json(const FrameRecord& r) {
  return json{{"frame_index", r.index},
              {"t_gen_ms", r.t_gen_ms},
              {"frame_type", std::string(1, codec::to_char(r.frame_type))},
              {"size_bits", r.size_bits},
              {"gop_index", r.gop_index}};
}

json packet_to_json(const PacketRecord& p) {
  return json{{"frame_index", p.frame_index},
              {"packet_index", p.packet_index},
              {"size_bits", p.size_bits},
              {"t_ready_ms", p.t_ready_ms}};
}

FrameType type_from_text(const std::string& text, int line) {
  if (text.size() != 1) throw ParseError(fmt::format("line {}: bad frame_type '{}'", line, text), "frame_type", line);
  try {
    return codec::frame_type_from_char(text[0]);
  } catch (const DomainError&) {
    throw ParseError(fmt::format("line {}: bad frame_type '{}'", line, text), "frame_type", line);
  }
}

json parse_json_document(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("malformed JSON ({})", e.what()), "", 0);
  }
}

template <typename T>
T json_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(fmt::format("missing field '{}'", key), key);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(fmt::format("field '{}' has the wrong type", key), key);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  return in;
}

Format format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? Format::kJson : Format::kCsv;
}

}  // namespace

FrameTrace generate_trace(const codec::FrameSizes& sizes, const codec::GopConfig& cfg, double duration_s,
                          const TraceOptions& options) {
  if (!(duration_s > 0.0)) throw DomainError("trace duration must be positive");
  if (!(options.jitter >= 0.0 && options.jitter < 1.0)) throw DomainError("jitter must lie in [0, 1)");
  if (!(sizes.i_bits >= 0.0 && sizes.p_bits >= 0.0)) throw DomainError("frame sizes must be non-negative");
  const std::int64_t gop_len = cfg.frames_per_gop();
  const auto pattern = codec::gop_pattern(cfg);
  const std::int64_t count = std::llround(duration_s * cfg.fps);
  if (count < 1) throw DomainError(fmt::format("{} s at {} fps holds no frame", duration_s, cfg.fps));

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jitter(1.0 - options.jitter, 1.0 + options.jitter);

  FrameTrace trace{cfg, sizes, duration_s, {}};
  trace.records.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    FrameRecord r;
    r.index = i;
    r.t_gen_ms = static_cast<double>(i) * 1000.0 / cfg.fps;
    r.frame_type = pattern[static_cast<std::size_t>(i % gop_len)];
    r.gop_index = i / gop_len;
    double bits = sizes.bits_for(r.frame_type) * (1.0 + cfg.redundancy_fraction);
    if (options.jitter > 0.0) bits *= jitter(rng);
    r.size_bits = std::llround(bits);
    trace.records.push_back(r);
  }
  return trace;
}

std::vector<PacketRecord> packetize(const FrameTrace& trace, std::int64_t mtu_payload_bits) {
  if (mtu_payload_bits <= 0) throw DomainError("MTU payload must be positive");
  std::vector<PacketRecord> packets;
  for (const auto& f : trace.records) {
    std::int64_t left = f.size_bits;
    for (std::int64_t k = 0; left > 0; ++k) {
      const std::int64_t size = std::min(left, mtu_payload_bits);
      packets.push_back({f.index, k, size, f.t_gen_ms});
      left -= size;
    }
  }
  return packets;
}

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  throw DomainError(fmt::format("unknown trace format '{}' (csv|json)", text));
}

void write_frames(std::ostream& out, const FrameTrace& trace, Format format) {
  if (format == Format::kCsv) {
    out << kFrameCsvHeader << '\n';
    for (const auto& r : trace.records) {
      out << fmt::format("{},{:.3f},{},{},{}\n", r.index, r.t_gen_ms, codec::to_char(r.frame_type), r.size_bits,
                         r.gop_index);
    }
    return;
  }
  json sizes{{"i_bits", trace.sizes.i_bits}, {"p_bits", trace.sizes.p_bits}};
  if (trace.sizes.b_bits) sizes["b_bits"] = *trace.sizes.b_bits;
  json doc{{"config",
            {{"gop_time_s", trace.config.gop_time_s},
             {"fps", trace.config.fps},
             {"redundancy_fraction", trace.config.redundancy_fraction},
             {"consecutive_b", trace.config.consecutive_b}}},
           {"sizes", sizes},
           {"duration_s", trace.duration_s},
           {"frames", json::array()}};
  for (const auto& r : trace.records) doc["frames"].push_back(frame_to_json(r));
  out << doc.dump(2) << '\n';
}

void write_packets(std::ostream& out, const std::vector<PacketRecord>& packets, Format format) {
  if (format == Format::kCsv) {
    out << kPacketCsvHeader << '\n';
    for (const auto& p : packets) {
      out << fmt::format("{},{},{},{:.3f}\n", p.frame_index, p.packet_index, p.size_bits, p.t_ready_ms);
    }
    return;
  }
  json doc{{"packets", json::array()}};
  for (const auto& p : packets) doc["packets"].push_back(packet_to_json(p));
  out << doc.dump(2) << '\n';
}

void export_frames(const std::filesystem::path& path, const FrameTrace& trace, Format format) {
  auto out = open_out(path);
  write_frames(out, trace, format);
  finish(out, path);
}

void export_packets(const std::filesystem::path& path, const std::vector<PacketRecord>& packets, Format format) {
  auto out = open_out(path);
  write_packets(out, packets, format);
  finish(out, path);
}

FrameTrace read_frames(std::istream& in, Format format) {
  FrameTrace trace;
  if (format == Format::kCsv) {
    std::vector<std::string> storage;
    for (const auto& [line, f] : read_rows(in, kFrameCsvHeader, storage)) {
      FrameRecord r;
      r.index = parse_field<std::int64_t>(f[0], "frame_index", line);
      r.t_gen_ms = parse_field<double>(f[1], "t_gen_ms", line);
      r.frame_type = type_from_text(std::string(f[2]), line);
      r.size_bits = parse_field<std::int64_t>(f[3], "size_bits", line);
      r.gop_index = parse_field<std::int64_t>(f[4], "gop_index", line);
      trace.records.push_back(r);
    }
    // CSV carries no config; recover what the rows imply.
    // Timestamps are printed to 3 decimals, so fit fps over the whole span and
    // rebuild exact t_gen where a row agrees with the fitted grid.
    if (trace.records.size() >= 2) {
      const auto& last = trace.records.back();
      const auto& first = trace.records.front();
      const double span = last.t_gen_ms - first.t_gen_ms;
      const double frames = static_cast<double>(last.index - first.index);
      if (span > 0.0 && frames > 0.0) {
        const double fps = std::round(1000.0 * frames / span * 1000.0) / 1000.0;
        trace.config.fps = fps;
        for (auto& r : trace.records) {
          const double exact = static_cast<double>(r.index) * 1000.0 / fps;
          if (std::abs(exact - r.t_gen_ms) <= 0.0005 + 1e-9) r.t_gen_ms = exact;
        }
      }
    }
    trace.duration_s = static_cast<double>(trace.records.size()) / trace.config.fps;
    return trace;
  }

  const json doc = parse_json_document(in);
  if (!doc.is_object()) throw ParseError("trace document must be an object", "$");
  const json cfg = json_field<json>(doc, "config");
  trace.config.gop_time_s = json_field<double>(cfg, "gop_time_s");
  trace.config.fps = json_field<double>(cfg, "fps");
  trace.config.redundancy_fraction = json_field<double>(cfg, "redundancy_fraction");
  trace.config.consecutive_b = json_field<int>(cfg, "consecutive_b");
  const json sizes = json_field<json>(doc, "sizes");
  trace.sizes.i_bits = json_field<double>(sizes, "i_bits");
  trace.sizes.p_bits = json_field<double>(sizes, "p_bits");
  if (sizes.contains("b_bits")) trace.sizes.b_bits = json_field<double>(sizes, "b_bits");
  trace.duration_s = json_field<double>(doc, "duration_s");
  for (const auto& f : json_field<json>(doc, "frames")) {
    FrameRecord r;
    r.index = json_field<std::int64_t>(f, "frame_index");
    r.t_gen_ms = json_field<double>(f, "t_gen_ms");
    r.frame_type = type_from_text(json_field<std::string>(f, "frame_type"), 0);
    r.size_bits = json_field<std::int64_t>(f, "size_bits");
    r.gop_index = json_field<std::int64_t>(f, "gop_index");
    trace.records.push_back(r);
  }
  return trace;
}

std::vector<PacketRecord> read_packets(std::istream& in, Format format) {
  std::vector<PacketRecord> packets;
  if (format == Format::kCsv) {
    std::vector<std::string> storage;
    for (const auto& [line, f] : read_rows(in, kPacketCsvHeader, storage)) {
      packets.push_back({parse_field<std::int64_t>(f[0], "frame_index", line),
                         parse_field<std::int64_t>(f[1], "packet_index", line),
                         parse_field<std::int64_t>(f[2], "size_bits", line),
                         parse_field<double>(f[3], "t_ready_ms", line)});
    }
    return packets;
  }
  const json doc = parse_json_document(in);
  if (!doc.is_object()) throw ParseError("packet document must be an object", "$");
  for (const auto& p : json_field<json>(doc, "packets")) {
    packets.push_back({json_field<std::int64_t>(p, "frame_index"), json_field<std::int64_t>(p, "packet_index"),
                       json_field<std::int64_t>(p, "size_bits"), json_field<double>(p, "t_ready_ms")});
  }
  return packets;
}

FrameTrace import_frames(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_frames(in, format_for(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.field(), e.line());
  }
}

std::vector<PacketRecord> import_packets(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_packets(in, format_for(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.field(), e.line());
  }
}

}  // namespace xrreq::tracegen

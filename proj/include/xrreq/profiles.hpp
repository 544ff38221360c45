#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xrreq/capacity.hpp"
#include "xrreq/latency.hpp"
#include "xrreq/stage_key.hpp"
#include "xrreq/types.hpp"
#include "xrreq/units.hpp"

// Data-driven registry of device profiles, evolution-stage parameter sets
// and named pipeline timings. Built once, immutable afterwards.
namespace xrreq::profiles {

struct RefreshMode {
  double hz = 0.0;
  std::optional<Resolution> render_target;
  // Stored rather than derived; see README "Quest 2 table".
  std::optional<Resolution> full_video;
  // Published figure, validated against render_target / fov at load.
  std::optional<double> ppd;
};

enum class TcpThroughputSource {
  // Full-view bitrate in bps.
  kFullView,
  // The full-view bitrate as published (binary Mi-bps, two decimals)
  // read back as decimal Mbps, the way the measured-device column of the
  // requirements table was computed.
  kPublishedFullView,
};

// Where a device's latency/loss requirements come from: either a stage
// of some taxonomy, or a measured MTP plus the TCP loss bound.
struct QosSource {
  std::optional<StageKey> stage;
  std::optional<double> measured_mtp_ms;
  bool tcp_loss_bound = false;
  TcpThroughputSource tcp_throughput = TcpThroughputSource::kFullView;
};

struct DeviceProfile {
  std::string name;
  std::optional<Resolution> per_eye;
  FovSpec fov;
  int bpc = 8;
  Chroma chroma = Chroma::k444;
  BitDepth depth;
  // Angular density for devices described by fov * ppd rather than by a
  // render target (the eye-like model).
  std::optional<double> ppd;
  capacity::CompressionProfile compression;
  std::vector<RefreshMode> refresh_modes;
  std::optional<latency::PipelineTiming> pipeline;
  std::optional<QosSource> qos;

  // First listed mode when hz is not given.
  const RefreshMode& mode(std::optional<double> hz = std::nullopt) const;
};

struct PublishedRate {
  std::string label;
  double value = 0.0;
  std::string unit;  // "Mbps", "Gbps", ...
  PrefixMode prefix = PrefixMode::kDecimal;

  BitRate bitrate() const;
};

struct StageProfile {
  std::string taxonomy;
  std::string stage;
  std::optional<Resolution> per_eye;
  std::optional<double> ppd;
  std::optional<double> fps_weak;
  std::optional<double> fps_strong;
  std::optional<int> bpc;
  std::optional<FovSpec> fov;
  std::optional<std::string> codec;
  std::map<Interaction, double> mtp_limits_ms;
  std::map<Interaction, double> loss_limits;
  std::vector<PublishedRate> published_bitrates;
};

struct PipelineProfile {
  std::string name;
  latency::PipelineTiming timing;
  std::string note;
};

class Registry {
 public:
  Registry() = default;

  // Embedded built-in data only.
  static const Registry& builtin();
  // Parses one profile document. `source` names it in diagnostics.
  static Registry parse(std::string_view json_text, std::string_view source);

  // Adds every entry of `other`; duplicate names are a ParseError.
  void merge(const Registry& other);

  const std::vector<DeviceProfile>& devices() const { return devices_; }
  const std::vector<StageProfile>& stages() const { return stages_; }
  const std::vector<PipelineProfile>& pipelines() const { return pipelines_; }

  const DeviceProfile& device(std::string_view name) const;
  const StageProfile& stage(std::string_view taxonomy, std::string_view stage) const;
  const PipelineProfile& pipeline(std::string_view name) const;

  // Exact interaction first, then the generic weak entry for weak
  // variants, then kAny.
  double mtp_limit(const StageKey& key) const;
  double loss_limit(const StageKey& key) const;

  std::vector<std::string> mtp_keys() const;
  std::vector<std::string> loss_keys() const;
  // Distinct taxonomies plus one group per device.
  std::vector<std::string> groups() const;

 private:
  std::vector<DeviceProfile> devices_;
  std::vector<StageProfile> stages_;
  std::vector<PipelineProfile> pipelines_;
};

// Built-in profiles merged with the document at `path`.
Registry load_profiles(const std::filesystem::path& path);
// Built-ins, plus the file named by XRREQ_PROFILES when set.
Registry load_default_profiles();

// Embedded profile document (JSON).
std::string_view builtin_profiles_json();

struct Quest2Row {
  double hz = 0.0;
  Resolution render_target;
  Resolution full_video;
  double ppd = 0.0;
  BitRate viewport_bitrate;
  BitRate full_bitrate;
};

// One row per refresh mode; viewport streams are stereo, full-view 360
// rasters mono, both at the device's compression factor.
std::vector<Quest2Row> reproduce_quest2_table(const Registry& registry,
                                              std::string_view device = "quest2");

struct RequirementsColumn {
  std::string device;
  double refresh_hz = 0.0;
  Resolution full_view;
  Resolution single_eye;
  FovSpec fov;
  int bpc = 0;
  int bpp = 0;
  double ppd = 0.0;
  std::vector<std::pair<double, BitRate>> bitrates;  // (factor, rate)
  std::optional<double> mtp_limit_ms;
  std::optional<double> loss_rate_raw;
  std::optional<double> loss_rate;  // conservative presentation value
  std::optional<double> delivery_percent;
};

RequirementsColumn compute_requirements(const Registry& registry, const DeviceProfile& device,
                                        std::optional<double> hz, std::span<const double> factors);

inline constexpr double kSummaryFactors[] = {1.0, 20.0, 600.0};

// Measured-device column (quest2 @ 72 Hz) and eye-like column.
std::vector<RequirementsColumn> reproduce_summary_table(const Registry& registry);

}  // namespace xrreq::profiles

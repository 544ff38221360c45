#include "xrreq/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "xrreq/errors.hpp"
#include "xrreq/geometry.hpp"
#include "xrreq/reliability.hpp"

namespace xrreq::profiles {
namespace {

using nlohmann::json;

constexpr double kPpdTolerance = 0.01;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ParseError(fmt::format("{}: {}", path, message), path);
}

std::string child(const std::string& path, std::string_view key) { return fmt::format("{}.{}", path, key); }
std::string child(const std::string& path, std::size_t index) { return fmt::format("{}[{}]", path, index); }

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(child(path, key), fmt::format("unknown key '{}'", key));
    }
  }
}

const json& member(const json& j, const std::string& path, std::string_view key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(child(path, key), fmt::format("missing required key '{}'", key));
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::optional<double> opt_number(const json& j, const std::string& path, std::string_view key) {
  const auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  return as_number(*it, child(path, key));
}

double number_or(const json& j, const std::string& path, std::string_view key, double fallback) {
  return opt_number(j, path, key).value_or(fallback);
}

Resolution parse_resolution(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"width", "height"});
  Resolution r{as_integer(member(j, path, "width"), child(path, "width")),
               as_integer(member(j, path, "height"), child(path, "height"))};
  if (r.width < 1 || r.height < 1) fail(path, "width and height must be at least 1");
  return r;
}

FovSpec parse_fov(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"horizontal", "vertical", "extra_h", "extra_v"});
  FovSpec fov;
  fov.horizontal.degrees = as_number(member(j, path, "horizontal"), child(path, "horizontal"));
  fov.vertical.degrees = as_number(member(j, path, "vertical"), child(path, "vertical"));
  fov.extra_h.degrees = number_or(j, path, "extra_h", 0.0);
  fov.extra_v.degrees = number_or(j, path, "extra_v", 0.0);
  if (!(fov.horizontal.degrees > 0.0 && fov.horizontal.degrees <= 360.0)) fail(path, "horizontal fov must lie in (0, 360]");
  if (!(fov.vertical.degrees > 0.0 && fov.vertical.degrees <= 180.0)) fail(path, "vertical fov must lie in (0, 180]");
  if (fov.extra_h.degrees < 0.0 || fov.extra_v.degrees < 0.0) fail(path, "timewarp margins must be non-negative");
  return fov;
}

Chroma parse_chroma(const json& j, const std::string& path) {
  const std::string text = as_string(j, path);
  if (text == "4:4:4") return Chroma::k444;
  if (text == "4:2:0") return Chroma::k420;
  fail(path, fmt::format("unknown chroma mode '{}' (4:4:4|4:2:0)", text));
}

PrefixMode parse_prefix(const json& j, const std::string& path) {
  try {
    return parse_prefix_mode(as_string(j, path));
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
}

Interaction parse_interaction_key(std::string_view text, const std::string& path) {
  try {
    return parse_interaction(text);
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
}

capacity::CompressionProfile parse_compression(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"name", "overall_factor", "iframe_factor", "pframe_factor", "bframe_factor"});
  capacity::CompressionProfile c;
  c.name = as_string(member(j, path, "name"), child(path, "name"));
  c.overall_factor = number_or(j, path, "overall_factor", 1.0);
  c.iframe_factor = opt_number(j, path, "iframe_factor");
  c.pframe_factor = opt_number(j, path, "pframe_factor");
  c.bframe_factor = opt_number(j, path, "bframe_factor");
  try {
    c.validate();
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
  return c;
}

latency::PipelineTiming parse_timing(const json& j, const std::string& path) {
  latency::PipelineTiming t;
  t.t_sense = number_or(j, path, "t_sense", 0.0);
  t.t_render = number_or(j, path, "t_render", 0.0);
  t.t_encode = number_or(j, path, "t_encode", 0.0);
  t.t_decode = number_or(j, path, "t_decode", 0.0);
  t.fixed_display = number_or(j, path, "fixed_display", 0.0);
  try {
    t.validate();
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
  return t;
}

QosSource parse_qos(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"stage", "measured_mtp_ms", "tcp_loss_bound", "tcp_throughput"});
  QosSource q;
  if (const auto it = j.find("stage"); it != j.end()) {
    try {
      q.stage = StageKey::parse(as_string(*it, child(path, "stage")));
    } catch (const DomainError& e) {
      fail(child(path, "stage"), e.what());
    }
  }
  q.measured_mtp_ms = opt_number(j, path, "measured_mtp_ms");
  if (const auto it = j.find("tcp_loss_bound"); it != j.end()) {
    if (!it->is_boolean()) fail(child(path, "tcp_loss_bound"), "expected true or false");
    q.tcp_loss_bound = it->get<bool>();
  }
  if (const auto it = j.find("tcp_throughput"); it != j.end()) {
    const std::string text = as_string(*it, child(path, "tcp_throughput"));
    if (text == "full_view") {
      q.tcp_throughput = TcpThroughputSource::kFullView;
    } else if (text == "published_full_view") {
      q.tcp_throughput = TcpThroughputSource::kPublishedFullView;
    } else {
      fail(child(path, "tcp_throughput"), fmt::format("unknown source '{}' (full_view|published_full_view)", text));
    }
  }
  if (q.tcp_loss_bound && !q.measured_mtp_ms) fail(path, "tcp_loss_bound needs measured_mtp_ms as the round-trip time");
  return q;
}

DeviceProfile parse_device(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path,
             {"name", "per_eye", "fov", "depth", "ppd", "compression", "refresh_modes", "pipeline", "qos"});
  DeviceProfile d;
  d.name = as_string(member(j, path, "name"), child(path, "name"));
  if (d.name.empty()) fail(child(path, "name"), "name must not be empty");
  if (const auto it = j.find("per_eye"); it != j.end()) d.per_eye = parse_resolution(*it, child(path, "per_eye"));
  d.fov = parse_fov(member(j, path, "fov"), child(path, "fov"));

  const std::string depth_path = child(path, "depth");
  const json& depth = member(j, path, "depth");
  expect_object(depth, depth_path);
  check_keys(depth, depth_path, {"bpc", "chroma"});
  d.bpc = static_cast<int>(as_integer(member(depth, depth_path, "bpc"), child(depth_path, "bpc")));
  d.chroma = depth.contains("chroma") ? parse_chroma(depth["chroma"], child(depth_path, "chroma")) : Chroma::k444;
  try {
    d.depth = BitDepth::from_bpc(d.bpc, d.chroma);
  } catch (const DomainError& e) {
    fail(depth_path, e.what());
  }

  d.ppd = opt_number(j, path, "ppd");
  if (d.ppd && !(*d.ppd > 0.0)) fail(child(path, "ppd"), "ppd must be positive");
  if (!d.per_eye && !d.ppd) fail(path, "a device needs per_eye or ppd");
  d.compression = j.contains("compression") ? parse_compression(j["compression"], child(path, "compression"))
                                            : capacity::CompressionProfile::raw();

  const std::string modes_path = child(path, "refresh_modes");
  const json& modes = member(j, path, "refresh_modes");
  if (!modes.is_array() || modes.empty()) fail(modes_path, "expected a non-empty array");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string mp = child(modes_path, i);
    const json& m = modes[i];
    expect_object(m, mp);
    check_keys(m, mp, {"hz", "render_target", "full_video", "ppd"});
    RefreshMode mode;
    mode.hz = as_number(member(m, mp, "hz"), child(mp, "hz"));
    if (!(mode.hz > 0.0)) fail(child(mp, "hz"), "refresh rate must be positive");
    if (m.contains("render_target")) mode.render_target = parse_resolution(m["render_target"], child(mp, "render_target"));
    if (m.contains("full_video")) mode.full_video = parse_resolution(m["full_video"], child(mp, "full_video"));
    mode.ppd = opt_number(m, mp, "ppd");
    if (mode.ppd && mode.render_target) {
      const double derived = static_cast<double>(mode.render_target->width) / d.fov.horizontal.degrees;
      if (std::abs(derived - *mode.ppd) > kPpdTolerance) {
        fail(child(mp, "ppd"), fmt::format("ppd {} disagrees with render target width / horizontal fov = {:.4f}",
                                           *mode.ppd, derived));
      }
    }
    for (const auto& prior : d.refresh_modes) {
      if (prior.hz == mode.hz) fail(child(mp, "hz"), fmt::format("duplicate refresh mode {} Hz", mode.hz));
    }
    d.refresh_modes.push_back(mode);
  }

  if (const auto it = j.find("pipeline"); it != j.end()) {
    const std::string pp = child(path, "pipeline");
    expect_object(*it, pp);
    check_keys(*it, pp, {"t_sense", "t_render", "t_encode", "t_decode", "fixed_display"});
    d.pipeline = parse_timing(*it, pp);
  }
  if (const auto it = j.find("qos"); it != j.end()) d.qos = parse_qos(*it, child(path, "qos"));
  return d;
}

std::map<Interaction, double> parse_limits(const json& j, const std::string& path) {
  expect_object(j, path);
  std::map<Interaction, double> limits;
  for (const auto& [key, value] : j.items()) {
    limits[parse_interaction_key(key, child(path, key))] = as_number(value, child(path, key));
  }
  return limits;
}

StageProfile parse_stage(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path,
             {"taxonomy", "stage", "per_eye", "ppd", "fps_weak", "fps_strong", "bpc", "fov", "codec",
              "mtp_limits_ms", "loss_limits", "published_bitrates"});
  StageProfile s;
  s.taxonomy = as_string(member(j, path, "taxonomy"), child(path, "taxonomy"));
  s.stage = as_string(member(j, path, "stage"), child(path, "stage"));
  if (s.taxonomy.empty() || s.stage.empty() || s.taxonomy.find('/') != std::string::npos ||
      s.stage.find('/') != std::string::npos) {
    fail(path, "taxonomy and stage must be non-empty and free of '/'");
  }
  if (j.contains("per_eye")) s.per_eye = parse_resolution(j["per_eye"], child(path, "per_eye"));
  s.ppd = opt_number(j, path, "ppd");
  s.fps_weak = opt_number(j, path, "fps_weak");
  s.fps_strong = opt_number(j, path, "fps_strong");
  if (j.contains("bpc")) s.bpc = static_cast<int>(as_integer(j["bpc"], child(path, "bpc")));
  if (j.contains("fov")) s.fov = parse_fov(j["fov"], child(path, "fov"));
  if (j.contains("codec")) s.codec = as_string(j["codec"], child(path, "codec"));
  if (j.contains("mtp_limits_ms")) s.mtp_limits_ms = parse_limits(j["mtp_limits_ms"], child(path, "mtp_limits_ms"));
  if (j.contains("loss_limits")) s.loss_limits = parse_limits(j["loss_limits"], child(path, "loss_limits"));
  for (const auto& [k, v] : s.mtp_limits_ms) {
    if (!(v > 0.0)) fail(child(child(path, "mtp_limits_ms"), to_string(k)), "MTP limit must be positive");
  }
  for (const auto& [k, v] : s.loss_limits) {
    if (!(v >= 0.0 && v <= 1.0)) fail(child(child(path, "loss_limits"), to_string(k)), "loss rate must lie in [0, 1]");
  }
  if (const auto it = j.find("published_bitrates"); it != j.end()) {
    const std::string rp = child(path, "published_bitrates");
    if (!it->is_array()) fail(rp, "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string ep = child(rp, i);
      const json& e = (*it)[i];
      expect_object(e, ep);
      check_keys(e, ep, {"label", "value", "unit", "prefix"});
      PublishedRate r;
      r.label = as_string(member(e, ep, "label"), child(ep, "label"));
      r.value = as_number(member(e, ep, "value"), child(ep, "value"));
      r.unit = as_string(member(e, ep, "unit"), child(ep, "unit"));
      r.prefix = parse_prefix(member(e, ep, "prefix"), child(ep, "prefix"));
      try {
        (void)r.bitrate();
      } catch (const DomainError& err) {
        fail(child(ep, "unit"), err.what());
      }
      s.published_bitrates.push_back(std::move(r));
    }
  }
  return s;
}

PipelineProfile parse_pipeline(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"name", "t_sense", "t_render", "t_encode", "t_decode", "fixed_display", "note"});
  PipelineProfile p;
  p.name = as_string(member(j, path, "name"), child(path, "name"));
  if (p.name.empty()) fail(child(path, "name"), "name must not be empty");
  p.timing = parse_timing(j, path);
  if (j.contains("note")) p.note = as_string(j["note"], child(path, "note"));
  return p;
}

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::string stage_id(std::string_view taxonomy, std::string_view stage) {
  return fmt::format("{}/{}", taxonomy, stage);
}

std::string hz_label(double hz) { return fmt::format("{}", hz); }

double limit_lookup(const std::map<Interaction, double>& limits, Interaction wanted) {
  if (const auto it = limits.find(wanted); it != limits.end()) return it->second;
  if (wanted == Interaction::kWeak2d || wanted == Interaction::kWeak3d) {
    if (const auto it = limits.find(Interaction::kWeak); it != limits.end()) return it->second;
  }
  if (const auto it = limits.find(Interaction::kAny); it != limits.end()) return it->second;
  return std::nan("");
}

std::vector<std::string> limit_keys(const std::vector<StageProfile>& stages,
                                    std::map<Interaction, double> StageProfile::*field) {
  std::vector<std::string> keys;
  for (const auto& s : stages) {
    for (const auto& [interaction, value] : s.*field) {
      keys.push_back(StageKey{s.taxonomy, s.stage, interaction}.to_string());
    }
  }
  return keys;
}

}  // namespace

const RefreshMode& DeviceProfile::mode(std::optional<double> hz) const {
  if (refresh_modes.empty()) throw LookupError(fmt::format("device '{}' has no refresh modes", name), {});
  if (!hz) return refresh_modes.front();
  for (const auto& m : refresh_modes) {
    if (m.hz == *hz) return m;
  }
  std::vector<std::string> valid;
  for (const auto& m : refresh_modes) valid.push_back(hz_label(m.hz));
  throw LookupError(fmt::format("refresh mode {} Hz of device '{}'", *hz, name), std::move(valid));
}

BitRate PublishedRate::bitrate() const {
  static constexpr std::pair<char, int> kPowers[] = {{'K', 1}, {'M', 2}, {'G', 3}, {'T', 4}};
  std::string_view u = unit;
  if (!u.ends_with("bps")) throw DomainError(fmt::format("unit '{}' must end in bps", unit));
  u.remove_suffix(3);
  int power = 0;
  if (!u.empty()) {
    const auto it = std::find_if(std::begin(kPowers), std::end(kPowers),
                                 [&](const auto& p) { return p.first == u.front(); });
    if (u.size() != 1 || it == std::end(kPowers)) throw DomainError(fmt::format("unknown rate unit '{}'", unit));
    power = it->second;
  }
  const double base = prefix == PrefixMode::kBinary ? kKi : 1000.0;
  return BitRate{value * std::pow(base, power)};
}

const Registry& Registry::builtin() {
  static const Registry kBuiltin = parse(builtin_profiles_json(), "<builtin>");
  return kBuiltin;
}

Registry Registry::parse(std::string_view json_text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const int line = line_of_offset(json_text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(fmt::format("{}:{}: malformed JSON ({})", source, line, e.what()), "", line);
  }

  try {
    expect_object(doc, "$");
    check_keys(doc, "$", {"devices", "stages", "pipelines"});
    Registry fresh;
    auto each = [&](std::string_view key, auto&& handle) {
      const auto it = doc.find(key);
      if (it == doc.end()) return;
      const std::string path = child("$", key);
      if (!it->is_array()) fail(path, "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) handle((*it)[i], child(path, i));
    };
    each("devices", [&](const json& j, const std::string& p) {
      Registry one;
      one.devices_.push_back(parse_device(j, p));
      fresh.merge(one);
    });
    each("stages", [&](const json& j, const std::string& p) {
      Registry one;
      one.stages_.push_back(parse_stage(j, p));
      fresh.merge(one);
    });
    each("pipelines", [&](const json& j, const std::string& p) {
      Registry one;
      one.pipelines_.push_back(parse_pipeline(j, p));
      fresh.merge(one);
    });
    return fresh;
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", source, e.what()), e.field(), e.line());
  }
}

void Registry::merge(const Registry& other) {
  for (const auto& d : other.devices_) {
    const bool dup = std::any_of(devices_.begin(), devices_.end(), [&](const auto& x) { return x.name == d.name; });
    if (dup) throw ParseError(fmt::format("duplicate device name '{}'", d.name), "devices");
  }
  for (const auto& s : other.stages_) {
    const bool dup = std::any_of(stages_.begin(), stages_.end(), [&](const auto& x) {
      return x.taxonomy == s.taxonomy && x.stage == s.stage;
    });
    if (dup) throw ParseError(fmt::format("duplicate stage '{}'", stage_id(s.taxonomy, s.stage)), "stages");
  }
  for (const auto& p : other.pipelines_) {
    const bool dup = std::any_of(pipelines_.begin(), pipelines_.end(), [&](const auto& x) { return x.name == p.name; });
    if (dup) throw ParseError(fmt::format("duplicate pipeline name '{}'", p.name), "pipelines");
  }
  devices_.insert(devices_.end(), other.devices_.begin(), other.devices_.end());
  stages_.insert(stages_.end(), other.stages_.begin(), other.stages_.end());
  pipelines_.insert(pipelines_.end(), other.pipelines_.begin(), other.pipelines_.end());
}

const DeviceProfile& Registry::device(std::string_view name) const {
  for (const auto& d : devices_) {
    if (d.name == name) return d;
  }
  std::vector<std::string> valid;
  for (const auto& d : devices_) valid.push_back(d.name);
  throw LookupError(fmt::format("device '{}'", name), std::move(valid));
}

const StageProfile& Registry::stage(std::string_view taxonomy, std::string_view stage) const {
  for (const auto& s : stages_) {
    if (s.taxonomy == taxonomy && s.stage == stage) return s;
  }
  std::vector<std::string> valid;
  for (const auto& s : stages_) valid.push_back(stage_id(s.taxonomy, s.stage));
  throw LookupError(fmt::format("stage '{}'", stage_id(taxonomy, stage)), std::move(valid));
}

const PipelineProfile& Registry::pipeline(std::string_view name) const {
  for (const auto& p : pipelines_) {
    if (p.name == name) return p;
  }
  std::vector<std::string> valid;
  for (const auto& p : pipelines_) valid.push_back(p.name);
  throw LookupError(fmt::format("pipeline '{}'", name), std::move(valid));
}

double Registry::mtp_limit(const StageKey& key) const {
  const auto it = std::find_if(stages_.begin(), stages_.end(), [&](const auto& s) {
    return s.taxonomy == key.taxonomy && s.stage == key.stage;
  });
  const double v = it == stages_.end() ? std::nan("") : limit_lookup(it->mtp_limits_ms, key.interaction);
  if (std::isnan(v)) throw LookupError(fmt::format("MTP limit '{}'", key.to_string()), mtp_keys());
  return v;
}

double Registry::loss_limit(const StageKey& key) const {
  const auto it = std::find_if(stages_.begin(), stages_.end(), [&](const auto& s) {
    return s.taxonomy == key.taxonomy && s.stage == key.stage;
  });
  const double v = it == stages_.end() ? std::nan("") : limit_lookup(it->loss_limits, key.interaction);
  if (std::isnan(v)) throw LookupError(fmt::format("loss-rate limit '{}'", key.to_string()), loss_keys());
  return v;
}

std::vector<std::string> Registry::mtp_keys() const { return limit_keys(stages_, &StageProfile::mtp_limits_ms); }

std::vector<std::string> Registry::loss_keys() const { return limit_keys(stages_, &StageProfile::loss_limits); }

std::vector<std::string> Registry::groups() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& s : stages_) {
    if (seen.insert(s.taxonomy).second) out.push_back(s.taxonomy);
  }
  for (const auto& d : devices_) out.push_back(fmt::format("device:{}", d.name));
  return out;
}

Registry load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open profile file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("cannot read profile file '{}'", path.string()));
  Registry registry = Registry::builtin();
  registry.merge(Registry::parse(buffer.str(), path.string()));
  return registry;
}

Registry load_default_profiles() {
  const char* env = std::getenv("XRREQ_PROFILES");
  if (env == nullptr || *env == '\0') return Registry::builtin();
  return load_profiles(env);
}

std::vector<Quest2Row> reproduce_quest2_table(const Registry& registry, std::string_view device) {
  const DeviceProfile& d = registry.device(device);
  std::vector<Quest2Row> rows;
  for (const auto& m : d.refresh_modes) {
    if (!m.render_target || !m.full_video) {
      throw ConfigError(fmt::format("device '{}' @ {} Hz lacks render target or full-video size", d.name, m.hz));
    }
    Quest2Row row;
    row.hz = m.hz;
    row.render_target = *m.render_target;
    row.full_video = *m.full_video;
    row.ppd = geometry::ppd_from_fov(m.render_target->width, d.fov.horizontal);
    row.viewport_bitrate = capacity::hmd_capacity(*m.render_target, d.depth, m.hz, d.compression, true);
    row.full_bitrate = capacity::hmd_capacity(*m.full_video, d.depth, m.hz, d.compression, false);
    rows.push_back(row);
  }
  return rows;
}

RequirementsColumn compute_requirements(const Registry& registry, const DeviceProfile& device,
                                        std::optional<double> hz, std::span<const double> factors) {
  const RefreshMode& m = device.mode(hz);
  RequirementsColumn col;
  col.device = device.name;
  col.refresh_hz = m.hz;
  col.fov = device.fov;
  col.bpc = device.bpc;
  col.bpp = device.depth.bits_per_pixel;

  const bool angular = !m.render_target && device.ppd;
  if (angular) {
    col.ppd = *device.ppd;
    col.single_eye = Resolution{std::llround(device.fov.horizontal.degrees * col.ppd),
                                std::llround(device.fov.vertical.degrees * col.ppd)};
  } else {
    col.single_eye = m.render_target ? *m.render_target : *device.per_eye;
    col.ppd = geometry::ppd_from_fov(col.single_eye.width, device.fov.horizontal);
  }
  col.full_view = m.full_video ? *m.full_video
                               : geometry::full_sphere_resolution(col.single_eye, device.fov.horizontal, device.fov.vertical);

  for (const double f : factors) {
    const auto comp = capacity::CompressionProfile::overall(f);
    const BitRate rate = angular ? capacity::eye_like_capacity(device.fov, col.ppd, device.depth, m.hz, comp)
                                 : capacity::hmd_capacity(col.single_eye, device.depth, m.hz, comp, true);
    col.bitrates.emplace_back(f, rate);
  }

  if (device.qos) {
    const QosSource& q = *device.qos;
    if (q.stage) {
      col.mtp_limit_ms = registry.mtp_limit(*q.stage);
      col.loss_rate_raw = registry.loss_limit(*q.stage);
      col.loss_rate = col.loss_rate_raw;
    }
    if (q.measured_mtp_ms) col.mtp_limit_ms = q.measured_mtp_ms;
    if (q.tcp_loss_bound) {
      BitRate throughput = capacity::hmd_capacity(col.full_view, device.depth, m.hz, device.compression, false);
      if (q.tcp_throughput == TcpThroughputSource::kPublishedFullView) {
        const double published = std::round(in_units(throughput, kMi) * 100.0) / 100.0;
        throughput = BitRate{published * 1e6};
      }
      const double rtt_s = *q.measured_mtp_ms / 1000.0;
      col.loss_rate_raw = reliability::max_loss_rate(reliability::LossModel{}, throughput, rtt_s);
      col.loss_rate = reliability::conservative_loss_bound(*col.loss_rate_raw);
    }
    if (col.loss_rate) col.delivery_percent = reliability::delivery_success(*col.loss_rate);
  }
  return col;
}

std::vector<RequirementsColumn> reproduce_summary_table(const Registry& registry) {
  return {compute_requirements(registry, registry.device("quest2"), 72.0, kSummaryFactors),
          compute_requirements(registry, registry.device("eye-like"), std::nullopt, kSummaryFactors)};
}

}  // namespace xrreq::profiles

#include "xrreq/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "xrreq/capacity.hpp"
#include "xrreq/codec.hpp"
#include "xrreq/errors.hpp"
#include "xrreq/geometry.hpp"
#include "xrreq/latency.hpp"
#include "xrreq/netsim.hpp"
#include "xrreq/profiles.hpp"
#include "xrreq/reliability.hpp"
#include "xrreq/report.hpp"
#include "xrreq/tracegen.hpp"
#include "xrreq/units.hpp"

namespace xrreq::cli {
namespace {

using nlohmann::json;

enum class OutFormat { kText, kCsv, kJson };

struct Globals {
  std::string units = "binary";
  std::string format = "text";
  std::optional<std::string> profile;
  std::optional<std::string> profiles_file;
  std::uint64_t seed = 1;
};

struct Context {
  Globals g;
  PrefixMode mode = PrefixMode::kBinary;
  OutFormat format = OutFormat::kText;
  std::ostream* out = nullptr;
  std::optional<profiles::Registry> registry_cache;

  const profiles::Registry& registry() {
    if (!registry_cache) {
      registry_cache = g.profiles_file ? profiles::load_profiles(*g.profiles_file) : profiles::load_default_profiles();
    }
    return *registry_cache;
  }
  const profiles::DeviceProfile* device() {
    return g.profile ? &registry().device(*g.profile) : nullptr;
  }
};

// One output cell. `text` is what the human formatter prints; machine
// formats use `value`. Hidden cells only appear in csv/json.
struct Field {
  std::string key;
  json value;
  std::string text;
  bool hidden = false;
};
using Record = std::vector<Field>;

std::string num(double v) { return fmt::format("{:.6g}", v); }

void add(Record& r, std::string key, double v) { r.push_back({std::move(key), v, num(v)}); }
void add_int(Record& r, std::string key, std::int64_t v) { r.push_back({std::move(key), v, fmt::format("{}", v)}); }
void add_text(Record& r, std::string key, std::string v) {
  r.push_back({std::move(key), v, v});
}
void add_rate(Record& r, const std::string& key, BitRate rate, PrefixMode mode) {
  r.push_back({key + "_bps", rate.bits_per_second, fmt::format("{}", rate.bits_per_second), true});
  const std::string text = format_bitrate(rate, mode);
  r.push_back({key, text, text});
}
void add_res(Record& r, std::string key, const Resolution& res) {
  r.push_back({std::move(key), json{{"width", res.width}, {"height", res.height}},
               fmt::format("{}x{}", res.width, res.height)});
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("width")) return fmt::format("{}x{}", v["width"].get<std::int64_t>(), v["height"].get<std::int64_t>());
  if (v.is_number_float()) return fmt::format("{}", v.get<double>());
  return v.dump();
}

void emit(Context& ctx, std::string_view command, const Record& rec) {
  std::ostream& out = *ctx.out;
  switch (ctx.format) {
    case OutFormat::kJson: {
      json doc{{"command", command}, {"units", std::string(to_string(ctx.mode))}};
      for (const auto& f : rec) doc[f.key] = f.value;
      out << doc.dump(2) << '\n';
      break;
    }
    case OutFormat::kCsv: {
      std::string header, row;
      for (const auto& f : rec) {
        header += (header.empty() ? "" : ",") + f.key;
        row += (&f == &rec.front() ? "" : ",") + csv_cell(f.value);
      }
      out << header << '\n' << row << '\n';
      break;
    }
    case OutFormat::kText: {
      std::size_t width = 0;
      for (const auto& f : rec) {
        if (!f.hidden) width = std::max(width, f.key.size());
      }
      for (const auto& f : rec) {
        if (!f.hidden) out << fmt::format("{:<{}}  {}\n", f.key, width, f.text);
      }
      break;
    }
  }
}

void emit_rows(Context& ctx, std::string_view command, const std::vector<Record>& rows) {
  std::ostream& out = *ctx.out;
  if (ctx.format == OutFormat::kJson) {
    json doc{{"command", command}, {"units", std::string(to_string(ctx.mode))}, {"rows", json::array()}};
    for (const auto& rec : rows) {
      json row = json::object();
      for (const auto& f : rec) row[f.key] = f.value;
      doc["rows"].push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
    return;
  }
  if (rows.empty()) return;
  const bool text = ctx.format == OutFormat::kText;
  std::vector<std::size_t> widths;
  std::vector<const Field*> cols;
  for (const auto& f : rows.front()) {
    if (text && f.hidden) continue;
    cols.push_back(&f);
  }
  auto cell = [&](const Field& f) { return text ? f.text : csv_cell(f.value); };
  widths.resize(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) widths[c] = cols[c]->key.size();
  if (text) {
    for (const auto& rec : rows) {
      std::size_t c = 0;
      for (const auto& f : rec) {
        if (f.hidden) continue;
        if (c < widths.size()) widths[c] = std::max(widths[c], f.text.size());
        ++c;
      }
    }
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (text) {
        s += fmt::format("{:<{}}", cells[c], c + 1 < cells.size() ? widths[c] + 2 : 0);
      } else {
        s += (c ? "," : "") + cells[c];
      }
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << '\n';
  };
  std::vector<std::string> header;
  for (const auto* f : cols) header.push_back(f->key);
  line(header);
  for (const auto& rec : rows) {
    std::vector<std::string> cells;
    for (const auto& f : rec) {
      if (text && f.hidden) continue;
      cells.push_back(cell(f));
    }
    line(cells);
  }
}

// "1920x1080" style pairs.
std::pair<double, double> parse_pair(std::string_view text, std::string_view what) {
  const auto x = text.find_first_of("xX");
  auto number = [&](std::string_view part) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw DomainError(fmt::format("bad {} '{}' (expected AxB)", what, text));
    }
    return v;
  };
  if (x == std::string_view::npos) throw DomainError(fmt::format("bad {} '{}' (expected AxB)", what, text));
  return {number(text.substr(0, x)), number(text.substr(x + 1))};
}

Resolution parse_res(std::string_view text) {
  const auto [w, h] = parse_pair(text, "resolution");
  if (w != std::floor(w) || h != std::floor(h)) throw DomainError(fmt::format("resolution '{}' must be integral", text));
  return {static_cast<std::int64_t>(w), static_cast<std::int64_t>(h)};
}

FovSpec parse_fov_pair(std::string_view text) {
  const auto [h, v] = parse_pair(text, "field of view");
  FovSpec f;
  f.horizontal.degrees = h;
  f.vertical.degrees = v;
  return f;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!part.empty()) out.emplace_back(part);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Chroma parse_chroma(std::string_view text) {
  if (text == "444" || text == "4:4:4") return Chroma::k444;
  if (text == "420" || text == "4:2:0") return Chroma::k420;
  throw DomainError(fmt::format("unknown chroma '{}' (444|420)", text));
}

// --bpp wins over --bpc/--chroma, which win over the profile.
struct DepthOpts {
  std::optional<int> bpp;
  std::optional<int> bpc;
  std::optional<std::string> chroma;

  void attach(CLI::App* app) {
    app->add_option("--bpp", bpp, "Bits per pixel");
    app->add_option("--bpc", bpc, "Bits per color channel");
    app->add_option("--chroma", chroma, "Chroma subsampling: 444 or 420");
  }
  BitDepth resolve(std::optional<BitDepth> fallback) const {
    if (bpp) {
      if (*bpp < 1 || *bpp > 64) throw DomainError(fmt::format("bits per pixel must lie in [1, 64] (got {})", *bpp));
      return BitDepth{*bpp};
    }
    if (bpc || chroma) return BitDepth::from_bpc(bpc.value_or(8), chroma ? parse_chroma(*chroma) : Chroma::k444);
    return fallback.value_or(BitDepth{24});
  }
};

// Frame-size and GOP options shared by gop, trace and simulate.
struct StreamOpts {
  std::optional<std::string> res;
  std::optional<std::string> fov;
  std::optional<std::string> extra;
  double picture = 0.10;
  double dof = 0.15;
  DepthOpts depth;
  std::optional<double> iframe;
  std::optional<double> pframe;
  std::optional<double> bframe;
  double gop = 2.0;
  std::optional<double> fps;
  double redundancy = 0.10;
  int b_frames = 0;

  void attach(CLI::App* app) {
    app->add_option("--res", res, "Per-eye resolution WxH (default 1920x1920)");
    app->add_option("--fov", fov, "Per-eye field of view HxV in degrees (default 120x120)");
    app->add_option("--extra", extra, "Timewarp margins HxV in degrees (default 12x12)");
    app->add_option("--picture", picture, "Extra picture fraction")->capture_default_str();
    app->add_option("--dof", dof, "Depth-of-field overhead fraction")->capture_default_str();
    depth.attach(app);
    app->add_option("--iframe", iframe, "I-frame compression factor (default 38)");
    app->add_option("--pframe", pframe, "P-frame compression factor (default 165)");
    app->add_option("--bframe", bframe, "B-frame compression factor");
    app->add_option("--gop", gop, "GOP duration in seconds")->capture_default_str();
    app->add_option("--fps", fps, "Frame rate (default 90)");
    app->add_option("--redundancy", redundancy, "Redundancy fraction")->capture_default_str();
    app->add_option("--b-frames", b_frames, "Consecutive B-frames between references")->capture_default_str();
  }

  codec::RenderSurface surface(const profiles::DeviceProfile* d) const {
    codec::RenderSurface s;
    s.per_eye = res ? parse_res(*res) : (d && d->per_eye ? *d->per_eye : Resolution{1920, 1920});
    FovSpec f = d ? d->fov : FovSpec{{120.0}, {120.0}, {12.0}, {12.0}};
    if (fov) {
      const FovSpec p = parse_fov_pair(*fov);
      f.horizontal = p.horizontal;
      f.vertical = p.vertical;
    }
    if (extra) {
      const FovSpec p = parse_fov_pair(*extra);
      f.extra_h = p.horizontal;
      f.extra_v = p.vertical;
    }
    s.fov = f;
    s.extra_picture_fraction = picture;
    s.dof_fraction = dof;
    s.depth = depth.resolve(d ? std::optional<BitDepth>(d->depth) : std::optional<BitDepth>(BitDepth{12}));
    return s;
  }

  capacity::CompressionProfile compression(const profiles::DeviceProfile* d) const {
    capacity::CompressionProfile c;
    if (d) c = d->compression;
    c.name = d ? c.name : "H.265";
    c.iframe_factor = iframe ? iframe : (c.iframe_factor ? c.iframe_factor : std::optional<double>(38.0));
    c.pframe_factor = pframe ? pframe : (c.pframe_factor ? c.pframe_factor : std::optional<double>(165.0));
    if (bframe) c.bframe_factor = bframe;
    c.validate();
    return c;
  }

  codec::GopConfig config(const profiles::DeviceProfile* d) const {
    codec::GopConfig cfg;
    cfg.gop_time_s = gop;
    cfg.fps = fps ? *fps : (d ? d->mode().hz : 90.0);
    cfg.redundancy_fraction = redundancy;
    cfg.consecutive_b = b_frames;
    cfg.validate();
    return cfg;
  }
};

struct TimingOpts {
  std::optional<std::string> pipeline;
  std::optional<std::string> sense, render, encode, decode, display;

  void attach(CLI::App* app) {
    app->add_option("--pipeline", pipeline, "Named pipeline timing profile");
    app->add_option("--sense", sense, "Sensing delay (e.g. 1ms)");
    app->add_option("--render", render, "Render delay");
    app->add_option("--encode", encode, "Encode delay");
    app->add_option("--decode", decode, "Decode delay");
    app->add_option("--display", display, "Fixed display (pixel response) delay");
  }
  latency::PipelineTiming resolve(Context& ctx) const {
    latency::PipelineTiming t;
    if (pipeline) {
      t = ctx.registry().pipeline(*pipeline).timing;
    } else if (const auto* d = ctx.device(); d && d->pipeline) {
      t = *d->pipeline;
    }
    auto set = [](double& field, const std::optional<std::string>& v) {
      if (v) field = parse_duration_ms(*v);
    };
    set(t.t_sense, sense);
    set(t.t_render, render);
    set(t.t_encode, encode);
    set(t.t_decode, decode);
    set(t.fixed_display, display);
    t.validate();
    return t;
  }
};

latency::VsyncMode parse_vsync(std::string_view text) {
  if (text == "max") return latency::VsyncMode::kMax;
  if (text == "avg" || text == "average") return latency::VsyncMode::kAverage;
  throw DomainError(fmt::format("unknown vsync mode '{}' (max|avg)", text));
}

void add_timing(Record& r, const latency::PipelineTiming& t) {
  add(r, "t_sense_ms", t.t_sense);
  add(r, "t_render_ms", t.t_render);
  add(r, "t_encode_ms", t.t_encode);
  add(r, "t_decode_ms", t.t_decode);
  add(r, "fixed_display_ms", t.fixed_display);
}

std::ostream& open_output(const std::optional<std::string>& path, std::ofstream& file, std::ostream& fallback) {
  if (!path) return fallback;
  file.open(*path, std::ios::binary);
  if (!file) throw IoError(fmt::format("cannot open '{}' for writing", *path));
  return file;
}

void close_output(const std::optional<std::string>& path, std::ofstream& file) {
  if (!path) return;
  file.flush();
  if (!file) throw IoError(fmt::format("write to '{}' failed", *path));
}

tracegen::Format trace_format(Context& ctx, const std::optional<std::string>& path) {
  if (ctx.format == OutFormat::kJson) return tracegen::Format::kJson;
  if (ctx.format == OutFormat::kCsv) return tracegen::Format::kCsv;
  return path && path->ends_with(".json") ? tracegen::Format::kJson : tracegen::Format::kCsv;
}

// ---------------------------------------------------------------- geometry

void setup_geometry(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* geo = app.add_subcommand("geometry", "Pixel density, field of view and angular resolution");
  geo->require_subcommand(1);

  {
    auto* c = geo->add_subcommand("ppi", "Pixels per inch from resolution and panel size");
    auto res = std::make_shared<std::string>();
    auto size = std::make_shared<std::optional<std::string>>();
    auto diag = std::make_shared<std::optional<double>>();
    c->add_option("--res", *res, "Resolution WxH")->required();
    auto* size_opt = c->add_option("--size", *size, "Panel size WxH in inches");
    c->add_option("--diagonal", *diag, "Panel diagonal in inches")->excludes(size_opt);
    c->callback([&, res, size, diag] {
      action = [&, res, size, diag] {
        const Resolution r = parse_res(*res);
        double v = 0.0;
        if (*size) {
          const auto [w, h] = parse_pair(**size, "panel size");
          v = geometry::ppi(r, PhysicalSize{w, h});
        } else if (*diag) {
          v = geometry::ppi_from_diagonal(r, **diag);
        } else {
          throw ConfigError("one of --size or --diagonal is required");
        }
        Record rec;
        add(rec, "ppi", v);
        emit(ctx, "geometry ppi", rec);
      };
    });
  }
  {
    auto* c = geo->add_subcommand("fov", "Field of view subtended by a flat extent");
    auto extent = std::make_shared<double>();
    auto distance = std::make_shared<double>();
    c->add_option("--extent", *extent, "Extent in inches")->required();
    c->add_option("--distance", *distance, "Viewing distance in inches")->required();
    c->callback([&, extent, distance] {
      action = [&, extent, distance] {
        Record rec;
        add(rec, "fov_deg", geometry::fov_from_physical(*extent, *distance).degrees);
        emit(ctx, "geometry fov", rec);
      };
    });
  }
  {
    auto* c = geo->add_subcommand("ppd", "Pixels per degree");
    auto pixels = std::make_shared<std::int64_t>();
    auto fov = std::make_shared<std::optional<double>>();
    auto extent = std::make_shared<std::optional<double>>();
    auto distance = std::make_shared<std::optional<double>>();
    c->add_option("--pixels", *pixels, "Pixels across the extent")->required();
    auto* fov_opt = c->add_option("--fov", *fov, "Field of view in degrees");
    c->add_option("--extent", *extent, "Extent in inches")->excludes(fov_opt);
    c->add_option("--distance", *distance, "Viewing distance in inches")->excludes(fov_opt);
    c->callback([&, pixels, fov, extent, distance] {
      action = [&, pixels, fov, extent, distance] {
        Record rec;
        if (*fov) {
          add(rec, "ppd", geometry::ppd_from_fov(*pixels, Angle{**fov}));
        } else if (*extent && *distance) {
          add(rec, "fov_deg", geometry::fov_from_physical(**extent, **distance).degrees);
          add(rec, "ppd", geometry::ppd_from_physical(*pixels, **extent, **distance));
        } else {
          throw ConfigError("give --fov, or --extent with --distance");
        }
        emit(ctx, "geometry ppd", rec);
      };
    });
  }
  {
    auto* c = geo->add_subcommand("scale", "Resolution needed to keep a viewport's density over another fov");
    auto pixels = std::make_shared<std::int64_t>();
    auto from = std::make_shared<double>();
    auto to = std::make_shared<double>(360.0);
    c->add_option("--pixels", *pixels, "Viewport pixels")->required();
    c->add_option("--from", *from, "Viewport fov in degrees")->required();
    c->add_option("--to", *to, "Target fov in degrees")->capture_default_str();
    c->callback([&, pixels, from, to] {
      action = [&, pixels, from, to] {
        Record rec;
        add_int(rec, "pixels", geometry::scale_resolution(*pixels, Angle{*from}, Angle{*to}));
        emit(ctx, "geometry scale", rec);
      };
    });
  }
  {
    auto* c = geo->add_subcommand("cones", "Angular resolution of a cone mosaic");
    auto density = std::make_shared<double>();
    auto lens = std::make_shared<double>(17.1);
    c->add_option("--density", *density, "Peak cone density per mm^2")->required();
    c->add_option("--lens", *lens, "Lens to fovea distance in mm")->capture_default_str();
    c->callback([&, density, lens] {
      action = [&, density, lens] {
        Record rec;
        add(rec, "ppd", geometry::ppd_from_cone_density(*density, *lens));
        emit(ctx, "geometry cones", rec);
      };
    });
  }
}

// ---------------------------------------------------------------- capacity

void setup_capacity(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* cap = app.add_subcommand("capacity", "Required bitrate models");
  cap->require_subcommand(1);

  auto factor_of = [&ctx](const std::optional<double>& factor) {
    if (factor) return capacity::CompressionProfile::overall(*factor);
    if (const auto* d = ctx.device()) return capacity::CompressionProfile::overall(d->compression.overall_factor);
    return capacity::CompressionProfile::raw();
  };
  auto fps_of = [&ctx](const std::optional<double>& fps) -> double {
    if (fps) return *fps;
    if (const auto* d = ctx.device()) return d->mode().hz;
    throw ConfigError("--fps is required without --profile");
  };
  auto depth_of = [&ctx](const DepthOpts& o) {
    const auto* d = ctx.device();
    return o.resolve(d ? std::optional<BitDepth>(d->depth) : std::nullopt);
  };

  {
    auto* c = cap->add_subcommand("eye-like", "Stereo viewport sized by fov and ppd");
    struct Opts {
      std::optional<double> ppd, fps, factor;
      std::optional<std::string> fov;
      DepthOpts depth;
    };
    auto o = std::make_shared<Opts>();
    c->add_option("--ppd", o->ppd, "Pixels per degree");
    c->add_option("--fov", o->fov, "Per-eye fov HxV in degrees");
    c->add_option("--fps", o->fps, "Frame rate");
    c->add_option("--factor", o->factor, "Overall compression factor");
    o->depth.attach(c);
    c->callback([&, o, factor_of, fps_of, depth_of] {
      action = [&, o, factor_of, fps_of, depth_of] {
        const auto* d = ctx.device();
        const FovSpec fov = o->fov ? parse_fov_pair(*o->fov) : (d ? d->fov : throw ConfigError("--fov is required"));
        const double ppd = o->ppd ? *o->ppd : (d && d->ppd ? *d->ppd : throw ConfigError("--ppd is required"));
        const auto comp = factor_of(o->factor);
        const BitDepth depth = depth_of(o->depth);
        Record rec;
        add(rec, "pixels_per_eye", capacity::eye_like_pixels_per_eye(fov, ppd));
        add_int(rec, "bpp", depth.bits_per_pixel);
        add(rec, "factor", comp.overall_factor);
        add_rate(rec, "bitrate", capacity::eye_like_capacity(fov, ppd, depth, fps_of(o->fps), comp), ctx.mode);
        emit(ctx, "capacity eye-like", rec);
      };
    });
  }
  {
    auto* c = cap->add_subcommand("hmd", "Viewport stream sized by the panel resolution");
    struct Opts {
      std::optional<std::string> res;
      std::optional<double> fps, factor;
      bool mono = false;
      DepthOpts depth;
    };
    auto o = std::make_shared<Opts>();
    c->add_option("--res", o->res, "Per-eye resolution WxH");
    c->add_option("--fps", o->fps, "Frame rate");
    c->add_option("--factor", o->factor, "Overall compression factor");
    c->add_flag("--mono", o->mono, "Single raster (full-view video) instead of two eyes");
    o->depth.attach(c);
    c->callback([&, o, factor_of, fps_of, depth_of] {
      action = [&, o, factor_of, fps_of, depth_of] {
        const auto* d = ctx.device();
        Resolution res;
        if (o->res) {
          res = parse_res(*o->res);
        } else if (d && d->per_eye) {
          res = *d->per_eye;
        } else {
          throw ConfigError("--res is required");
        }
        const auto comp = factor_of(o->factor);
        Record rec;
        add_res(rec, "resolution", res);
        add(rec, "factor", comp.overall_factor);
        add_rate(rec, "bitrate", capacity::hmd_capacity(res, depth_of(o->depth), fps_of(o->fps), comp, !o->mono),
                 ctx.mode);
        emit(ctx, "capacity hmd", rec);
      };
    });
  }
  {
    auto* c = cap->add_subcommand("sphere", "Full 360x180 raster at a given ppd");
    struct Opts {
      std::optional<double> ppd, fps, factor;
      DepthOpts depth;
    };
    auto o = std::make_shared<Opts>();
    c->add_option("--ppd", o->ppd, "Pixels per degree");
    c->add_option("--fps", o->fps, "Frame rate");
    c->add_option("--factor", o->factor, "Overall compression factor");
    o->depth.attach(c);
    c->callback([&, o, factor_of, fps_of, depth_of] {
      action = [&, o, factor_of, fps_of, depth_of] {
        const auto* d = ctx.device();
        const double ppd = o->ppd ? *o->ppd : (d && d->ppd ? *d->ppd : throw ConfigError("--ppd is required"));
        const auto comp = factor_of(o->factor);
        Record rec;
        add(rec, "factor", comp.overall_factor);
        add_rate(rec, "bitrate", capacity::full_sphere_capacity(ppd, depth_of(o->depth), fps_of(o->fps), comp),
                 ctx.mode);
        emit(ctx, "capacity sphere", rec);
      };
    });
  }
  {
    auto* c = cap->add_subcommand("volumetric", "Point-cloud video");
    struct Opts {
      std::int64_t voxels = 0;
      double fps = 30.0;
      std::optional<double> factor;
      int color = 24;
      int position = 48;
    };
    auto o = std::make_shared<Opts>();
    c->add_option("--voxels", o->voxels, "Voxels per frame")->required();
    c->add_option("--fps", o->fps, "Frame rate")->capture_default_str();
    c->add_option("--factor", o->factor, "Overall compression factor");
    c->add_option("--color", o->color, "Color bits per voxel")->capture_default_str();
    c->add_option("--position", o->position, "Position bits per voxel")->capture_default_str();
    c->callback([&, o, factor_of] {
      action = [&, o, factor_of] {
        capacity::VoxelSpec v;
        v.color_depth = o->color;
        v.position_depth = o->position;
        v.voxels_per_frame = o->voxels;
        const auto comp = factor_of(o->factor);
        Record rec;
        add_int(rec, "bits_per_voxel", v.bits_per_voxel());
        add(rec, "factor", comp.overall_factor);
        add_rate(rec, "bitrate", capacity::volumetric_capacity(v, o->fps, comp), ctx.mode);
        emit(ctx, "capacity volumetric", rec);
      };
    });
  }
}

// --------------------------------------------------------------------- gop

void setup_gop(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* gop = app.add_subcommand("gop", "GOP frame sizes and strong-interaction bitrate");
  gop->require_subcommand(1);
  for (const bool with_rate : {false, true}) {
    auto* c = gop->add_subcommand(with_rate ? "bitrate" : "sizes",
                                  with_rate ? "Strong-interaction stream bitrate" : "I/P(/B) frame sizes");
    auto o = std::make_shared<StreamOpts>();
    o->attach(c);
    c->callback([&, o, with_rate] {
      action = [&, o, with_rate] {
        const auto* d = ctx.device();
        const auto surface = o->surface(d);
        const auto comp = o->compression(d);
        const auto cfg = o->config(d);
        const auto sizes = codec::frame_sizes(surface, comp);
        Record rec;
        add(rec, "nb_pixels", codec::nb_pixels(surface));
        add_int(rec, "bpp", surface.depth.bits_per_pixel);
        add(rec, "i_bits", sizes.i_bits);
        add(rec, "p_bits", sizes.p_bits);
        if (sizes.b_bits) add(rec, "b_bits", *sizes.b_bits);
        add_int(rec, "frames_per_gop", cfg.frames_per_gop());
        add_int(rec, "p_frames", codec::p_frame_count(cfg));
        if (with_rate) add_rate(rec, "bitrate", codec::strong_interaction_bitrate(surface, cfg, comp), ctx.mode);
        emit(ctx, with_rate ? "gop bitrate" : "gop sizes", rec);
      };
    });
  }
}

// ----------------------------------------------------------------- latency

void setup_latency(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* lat = app.add_subcommand("latency", "Motion-to-photon latency models");
  lat->require_subcommand(1);
  {
    auto* c = lat->add_subcommand("refresh", "Maximum and average refresh (VSync) wait");
    auto hz = std::make_shared<double>();
    c->add_option("--hz", *hz, "Refresh rate")->required();
    c->callback([&, hz] {
      action = [&, hz] {
        const auto r = latency::refresh_delay(*hz);
        Record rec;
        add(rec, "max_ms", r.max_ms);
        add(rec, "avg_ms", r.avg_ms);
        emit(ctx, "latency refresh", rec);
      };
    });
  }
  {
    auto* c = lat->add_subcommand("stream", "Encode + transmission + decode");
    struct Opts {
      std::string encode = "0ms", decode = "0ms", throughput;
      double bits = 0.0;
    };
    auto o = std::make_shared<Opts>();
    c->add_option("--encode", o->encode, "Encode delay")->capture_default_str();
    c->add_option("--decode", o->decode, "Decode delay")->capture_default_str();
    c->add_option("--bits", o->bits, "Frame size in bits")->required();
    c->add_option("--throughput", o->throughput, "Link throughput, e.g. 91M")->required();
    c->callback([&, o] {
      action = [&, o] {
        Record rec;
        add(rec, "stream_ms", latency::stream_latency(parse_duration_ms(o->encode), o->bits,
                                                      parse_bitrate(o->throughput), parse_duration_ms(o->decode)));
        emit(ctx, "latency stream", rec);
      };
    });
  }
  {
    auto* c = lat->add_subcommand("e2e", "Sensing + rendering + streaming + display");
    struct Opts {
      TimingOpts timing;
      std::string stream = "0ms";
      std::optional<double> hz;
      std::string vsync = "avg";
    };
    auto o = std::make_shared<Opts>();
    o->timing.attach(c);
    c->add_option("--stream", o->stream, "Streaming delay (communication, encode and decode)")->capture_default_str();
    c->add_option("--hz", o->hz, "Refresh rate; adds a VSync wait to the display delay");
    c->add_option("--vsync", o->vsync, "VSync wait: max or avg")->capture_default_str();
    c->callback([&, o] {
      action = [&, o] {
        const auto t = o->timing.resolve(ctx);
        const double display = o->hz ? latency::display_latency(t, *o->hz, parse_vsync(o->vsync)) : t.fixed_display;
        Record rec;
        add_timing(rec, t);
        add(rec, "display_ms", display);
        add(rec, "e2e_ms", latency::e2e_latency(t, parse_duration_ms(o->stream), display));
        emit(ctx, "latency e2e", rec);
      };
    });
  }
  {
    auto* c = lat->add_subcommand("budget", "Remaining MTP budget after every component");
    struct Opts {
      TimingOpts timing;
      std::optional<std::string> limit, stage;
      std::string ul = "0ms", dl = "0ms", vsync = "avg";
      std::optional<double> hz;
    };
    auto o = std::make_shared<Opts>();
    o->timing.attach(c);
    auto* limit = c->add_option("--limit", o->limit, "MTP limit (default 20ms)");
    c->add_option("--stage", o->stage, "Take the limit from a stage key")->excludes(limit);
    c->add_option("--ul", o->ul, "Uplink delay")->capture_default_str();
    c->add_option("--dl", o->dl, "Downlink delay")->capture_default_str();
    c->add_option("--hz", o->hz, "Charge a refresh wait at this rate");
    c->add_option("--vsync", o->vsync, "Refresh wait: max or avg")->capture_default_str();
    c->callback([&, o] {
      action = [&, o] {
        latency::LatencyBudget b;
        if (o->stage) {
          b.mtp_limit = latency::mtp_limit_for(ctx.registry(), StageKey::parse(*o->stage));
        } else if (o->limit) {
          b.mtp_limit = parse_duration_ms(*o->limit);
        }
        b.components = o->timing.resolve(ctx);
        b.comm_ul = parse_duration_ms(o->ul);
        b.comm_dl = parse_duration_ms(o->dl);
        b.refresh_hz = o->hz;
        b.vsync = parse_vsync(o->vsync);
        const auto result = latency::budget_check(b);
        if (ctx.format == OutFormat::kJson) {
          json doc{{"command", "latency budget"},
                   {"units", std::string(to_string(ctx.mode))},
                   {"mtp_limit_ms", b.mtp_limit},
                   {"remaining_ms", result.remaining_ms},
                   {"violated", result.violated},
                   {"breakdown", json::array()}};
          for (const auto& l : result.breakdown) {
            doc["breakdown"].push_back({{"component", l.component}, {"ms", l.ms}, {"share", l.share}});
          }
          *ctx.out << doc.dump(2) << '\n';
          return;
        }
        std::vector<Record> rows;
        for (const auto& l : result.breakdown) {
          Record r;
          add_text(r, "component", l.component);
          add(r, "ms", l.ms);
          add(r, "share", l.share);
          rows.push_back(std::move(r));
        }
        Record total;
        add_text(total, "component", "remaining");
        add(total, "ms", result.remaining_ms);
        add(total, "share", result.remaining_ms / b.mtp_limit);
        rows.push_back(std::move(total));
        emit_rows(ctx, "latency budget", rows);
        if (ctx.format == OutFormat::kText) {
          *ctx.out << (result.violated ? "budget violated\n" : "within budget\n");
        }
      };
    });
  }
  {
    auto* c = lat->add_subcommand("limits", "Registered MTP limits");
    auto stage = std::make_shared<std::optional<std::string>>();
    c->add_option("--stage", *stage, "Stage key taxonomy/stage[/interaction]");
    c->callback([&, stage] {
      action = [&, stage] {
        const auto& reg = ctx.registry();
        if (*stage) {
          const StageKey key = StageKey::parse(**stage);
          Record rec;
          add_text(rec, "stage", key.to_string());
          add(rec, "mtp_limit_ms", latency::mtp_limit_for(reg, key));
          emit(ctx, "latency limits", rec);
          return;
        }
        std::vector<Record> rows;
        for (const auto& k : reg.mtp_keys()) {
          Record r;
          add_text(r, "stage", k);
          add(r, "mtp_limit_ms", reg.mtp_limit(StageKey::parse(k)));
          rows.push_back(std::move(r));
        }
        emit_rows(ctx, "latency limits", rows);
      };
    });
  }
}

// ------------------------------------------------------------- reliability

void add_loss(Record& rec, double raw) {
  const double bound = reliability::conservative_loss_bound(raw);
  rec.push_back({"loss_rate", raw, fmt::format("{:.6g}", raw)});
  rec.push_back({"loss_rate_bound", bound, fmt::format("{:.2g}", bound)});
  const double pct = reliability::delivery_success(bound);
  rec.push_back({"delivery_percent", pct, format_percent(pct) + " %"});
}

void setup_reliability(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* rel = app.add_subcommand("reliability", "Packet-loss bounds and delivery rates");
  rel->require_subcommand(1);
  {
    auto* c = rel->add_subcommand("max-loss", "Largest loss rate a TCP flow tolerates at a throughput");
    struct Opts {
      std::string throughput, rtt;
      std::int64_t mss = 1460 * 8;
    };
    auto o = std::make_shared<Opts>();
    c->add_option("--throughput", o->throughput, "Required throughput, e.g. 140M")->required();
    c->add_option("--rtt", o->rtt, "Round-trip time, e.g. 20ms")->required();
    c->add_option("--mss", o->mss, "Maximum segment size in bits")->capture_default_str();
    c->callback([&, o] {
      action = [&, o] {
        reliability::LossModel model;
        model.mss_bits = o->mss;
        const double raw =
            reliability::max_loss_rate(model, parse_bitrate(o->throughput), parse_duration_ms(o->rtt) / 1000.0);
        Record rec;
        add_loss(rec, raw);
        emit(ctx, "reliability max-loss", rec);
      };
    });
  }
  {
    auto* c = rel->add_subcommand("delivery", "Convert between loss rate and delivery success");
    auto loss = std::make_shared<std::optional<double>>();
    auto pct = std::make_shared<std::optional<double>>();
    auto* loss_opt = c->add_option("--loss", *loss, "Loss rate in [0, 1]");
    c->add_option("--percent", *pct, "Delivery success in percent")->excludes(loss_opt);
    c->callback([&, loss, pct] {
      action = [&, loss, pct] {
        Record rec;
        if (*loss) {
          const double p = reliability::delivery_success(**loss);
          add(rec, "loss_rate", **loss);
          rec.push_back({"delivery_percent", p, format_percent(p) + " %"});
        } else if (*pct) {
          add(rec, "loss_rate", reliability::loss_from_delivery(**pct));
          rec.push_back({"delivery_percent", **pct, format_percent(**pct) + " %"});
        } else {
          throw ConfigError("one of --loss or --percent is required");
        }
        emit(ctx, "reliability delivery", rec);
      };
    });
  }
  {
    auto* c = rel->add_subcommand("requirements", "Registered loss-rate requirements");
    auto stage = std::make_shared<std::optional<std::string>>();
    c->add_option("--stage", *stage, "Stage key taxonomy/stage[/interaction]");
    c->callback([&, stage] {
      action = [&, stage] {
        const auto& reg = ctx.registry();
        auto row = [&](const StageKey& key) {
          const double loss = reliability::required_loss_rate(reg, key);
          const double p = reliability::delivery_success(loss);
          Record r;
          add_text(r, "stage", key.to_string());
          add(r, "loss_rate", loss);
          r.push_back({"delivery_percent", p, format_percent(p, 6) + " %"});
          return r;
        };
        if (*stage) {
          emit(ctx, "reliability requirements", row(StageKey::parse(**stage)));
          return;
        }
        std::vector<Record> rows;
        for (const auto& k : reg.loss_keys()) rows.push_back(row(StageKey::parse(k)));
        emit_rows(ctx, "reliability requirements", rows);
      };
    });
  }
}

// ---------------------------------------------------------------- profiles

json device_json(const profiles::DeviceProfile& d) {
  json j{{"name", d.name},
         {"fov", {{"horizontal", d.fov.horizontal.degrees}, {"vertical", d.fov.vertical.degrees},
                  {"extra_h", d.fov.extra_h.degrees}, {"extra_v", d.fov.extra_v.degrees}}},
         {"depth", {{"bpc", d.bpc}, {"chroma", d.chroma == Chroma::k444 ? "4:4:4" : "4:2:0"}}},
         {"bpp", d.depth.bits_per_pixel},
         {"compression", {{"name", d.compression.name}, {"overall_factor", d.compression.overall_factor}}},
         {"refresh_modes", json::array()}};
  if (d.per_eye) j["per_eye"] = {{"width", d.per_eye->width}, {"height", d.per_eye->height}};
  if (d.ppd) j["ppd"] = *d.ppd;
  if (d.compression.iframe_factor) j["compression"]["iframe_factor"] = *d.compression.iframe_factor;
  if (d.compression.pframe_factor) j["compression"]["pframe_factor"] = *d.compression.pframe_factor;
  for (const auto& m : d.refresh_modes) {
    json mj{{"hz", m.hz}};
    if (m.render_target) mj["render_target"] = {{"width", m.render_target->width}, {"height", m.render_target->height}};
    if (m.full_video) mj["full_video"] = {{"width", m.full_video->width}, {"height", m.full_video->height}};
    if (m.ppd) mj["ppd"] = *m.ppd;
    j["refresh_modes"].push_back(std::move(mj));
  }
  if (d.pipeline) {
    j["pipeline"] = {{"t_sense", d.pipeline->t_sense}, {"t_render", d.pipeline->t_render},
                     {"t_encode", d.pipeline->t_encode}, {"t_decode", d.pipeline->t_decode},
                     {"fixed_display", d.pipeline->fixed_display}};
  }
  if (d.qos) {
    json q = json::object();
    if (d.qos->stage) q["stage"] = d.qos->stage->to_string();
    if (d.qos->measured_mtp_ms) q["measured_mtp_ms"] = *d.qos->measured_mtp_ms;
    q["tcp_loss_bound"] = d.qos->tcp_loss_bound;
    j["qos"] = std::move(q);
  }
  return j;
}

json stage_json(const profiles::StageProfile& s) {
  json j{{"taxonomy", s.taxonomy}, {"stage", s.stage}};
  if (s.per_eye) j["per_eye"] = {{"width", s.per_eye->width}, {"height", s.per_eye->height}};
  if (s.ppd) j["ppd"] = *s.ppd;
  if (s.fps_weak) j["fps_weak"] = *s.fps_weak;
  if (s.fps_strong) j["fps_strong"] = *s.fps_strong;
  if (s.bpc) j["bpc"] = *s.bpc;
  if (s.fov) j["fov"] = {{"horizontal", s.fov->horizontal.degrees}, {"vertical", s.fov->vertical.degrees}};
  if (s.codec) j["codec"] = *s.codec;
  json mtp = json::object(), loss = json::object();
  for (const auto& [k, v] : s.mtp_limits_ms) mtp[std::string(to_string(k))] = v;
  for (const auto& [k, v] : s.loss_limits) loss[std::string(to_string(k))] = v;
  j["mtp_limits_ms"] = mtp;
  j["loss_limits"] = loss;
  j["published_bitrates"] = json::array();
  for (const auto& r : s.published_bitrates) {
    j["published_bitrates"].push_back({{"label", r.label}, {"value", r.value}, {"unit", r.unit},
                                       {"prefix", std::string(to_string(r.prefix))},
                                       {"bps", r.bitrate().bits_per_second}});
  }
  return j;
}

void setup_profiles(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* prof = app.add_subcommand("profiles", "Device, stage and pipeline registry");
  prof->require_subcommand(1);
  {
    auto* c = prof->add_subcommand("list", "List every registered entry");
    c->callback([&] {
      action = [&] {
        const auto& reg = ctx.registry();
        std::vector<Record> rows;
        auto row = [&](std::string kind, std::string name, std::string detail) {
          Record r;
          add_text(r, "kind", std::move(kind));
          add_text(r, "name", std::move(name));
          add_text(r, "detail", std::move(detail));
          rows.push_back(std::move(r));
        };
        for (const auto& d : reg.devices()) {
          std::string modes;
          for (const auto& m : d.refresh_modes) modes += (modes.empty() ? "" : "/") + fmt::format("{}", m.hz);
          row("device", d.name, fmt::format("{} Hz", modes));
        }
        for (const auto& s : reg.stages()) {
          row("stage", fmt::format("{}/{}", s.taxonomy, s.stage), s.codec.value_or(""));
        }
        for (const auto& p : reg.pipelines()) row("pipeline", p.name, p.note);
        emit_rows(ctx, "profiles list", rows);
      };
    });
  }
  {
    auto* c = prof->add_subcommand("show", "Show one device, stage (taxonomy/stage) or pipeline");
    auto name = std::make_shared<std::string>();
    c->add_option("name", *name, "Entry name")->required();
    c->callback([&, name] {
      action = [&, name] {
        const auto& reg = ctx.registry();
        json j;
        if (name->find('/') != std::string::npos) {
          const StageKey key = StageKey::parse(*name);
          j = stage_json(reg.stage(key.taxonomy, key.stage));
          j["kind"] = "stage";
        } else if (std::any_of(reg.pipelines().begin(), reg.pipelines().end(),
                               [&](const auto& p) { return p.name == *name; })) {
          const auto& p = reg.pipeline(*name);
          j = {{"kind", "pipeline"}, {"name", p.name}, {"note", p.note},
               {"t_sense", p.timing.t_sense}, {"t_render", p.timing.t_render}, {"t_encode", p.timing.t_encode},
               {"t_decode", p.timing.t_decode}, {"fixed_display", p.timing.fixed_display}};
        } else {
          j = device_json(reg.device(*name));
          j["kind"] = "device";
        }
        j["command"] = "profiles show";
        *ctx.out << j.dump(2) << '\n';
      };
    });
  }
  {
    auto* c = prof->add_subcommand("validate", "Check a profile file against the built-ins");
    auto path = std::make_shared<std::string>();
    c->add_option("path", *path, "Profile file")->required();
    c->callback([&, path] {
      action = [&, path] {
        const auto reg = profiles::load_profiles(*path);
        // Resolve every QoS stage reference so dangling keys surface here.
        for (const auto& d : reg.devices()) {
          if (d.qos && d.qos->stage) (void)reg.mtp_limit(*d.qos->stage);
        }
        Record rec;
        add_text(rec, "status", "ok");
        add_int(rec, "devices", static_cast<std::int64_t>(reg.devices().size()));
        add_int(rec, "stages", static_cast<std::int64_t>(reg.stages().size()));
        add_int(rec, "pipelines", static_cast<std::int64_t>(reg.pipelines().size()));
        emit(ctx, "profiles validate", rec);
      };
    });
  }
}

// ------------------------------------------------------------------- table

void write_columns_text(std::ostream& out, const report::RequirementsReport& rep, PrefixMode mode) {
  std::vector<std::pair<std::string, std::vector<std::string>>> lines;
  auto push = [&](std::string label, auto cell) {
    std::vector<std::string> cells;
    for (const auto& c : rep.rows) cells.push_back(cell(c));
    lines.emplace_back(std::move(label), std::move(cells));
  };
  push("device", [](const auto& c) { return c.device; });
  push("full-view resolution", [](const auto& c) { return fmt::format("{}x{}", c.full_view.width, c.full_view.height); });
  push("single-eye resolution", [](const auto& c) { return fmt::format("{}x{}", c.single_eye.width, c.single_eye.height); });
  push("single-eye fov", [](const auto& c) { return fmt::format("{}x{} deg", c.fov.horizontal.degrees, c.fov.vertical.degrees); });
  push("bpc", [](const auto& c) { return fmt::format("{}", c.bpc); });
  push("bpp", [](const auto& c) { return fmt::format("{}", c.bpp); });
  push("ppd", [](const auto& c) { return fmt::format("{:.2f}", c.ppd); });
  push("refresh rate", [](const auto& c) { return fmt::format("{} Hz", c.refresh_hz); });
  for (std::size_t i = 0; i < rep.factors.size(); ++i) {
    push(fmt::format("bitrate {}:1", rep.factors[i]),
         [&](const auto& c) { return "<= " + format_bitrate(c.bitrates[i].second, mode); });
  }
  push("MTP latency", [](const auto& c) { return c.mtp_limit_ms ? fmt::format("<= {} ms", *c.mtp_limit_ms) : "-"; });
  push("packet loss rate", [](const auto& c) { return c.loss_rate ? fmt::format("<= {:.2g}", *c.loss_rate) : "-"; });
  push("delivery success", [](const auto& c) {
    return c.delivery_percent ? ">= " + format_percent(*c.delivery_percent) + " %" : std::string("-");
  });
  std::size_t label_w = 0;
  std::vector<std::size_t> widths(rep.rows.size(), 0);
  for (const auto& [label, cells] : lines) {
    label_w = std::max(label_w, label.size());
    for (std::size_t i = 0; i < cells.size(); ++i) widths[i] = std::max(widths[i], cells[i].size());
  }
  for (const auto& [label, cells] : lines) {
    std::string s = fmt::format("{:<{}}", label, label_w);
    for (std::size_t i = 0; i < cells.size(); ++i) s += fmt::format("  {:<{}}", cells[i], widths[i]);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << '\n';
  }
}

void write_report(Context& ctx, const report::RequirementsReport& rep, std::string_view command) {
  switch (ctx.format) {
    case OutFormat::kJson: {
      std::ostringstream buf;
      report::write_json(buf, rep, ctx.mode);
      json doc = json::parse(buf.str());
      doc["command"] = command;
      *ctx.out << doc.dump(2) << '\n';
      break;
    }
    case OutFormat::kCsv:
      report::write_csv(*ctx.out, rep, ctx.mode);
      break;
    case OutFormat::kText:
      write_columns_text(*ctx.out, rep, ctx.mode);
      break;
  }
}

void setup_table(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* tab = app.add_subcommand("table", "Reproduce the published summary tables");
  tab->require_subcommand(1);
  {
    auto* c = tab->add_subcommand("quest2", "Per-refresh-mode render targets and bitrates");
    c->callback([&] {
      action = [&] {
        const std::string device = ctx.g.profile.value_or("quest2");
        std::vector<Record> rows;
        for (const auto& r : profiles::reproduce_quest2_table(ctx.registry(), device)) {
          Record rec;
          add(rec, "hz", r.hz);
          add_res(rec, "render_target", r.render_target);
          add_res(rec, "full_video", r.full_video);
          rec.push_back({"ppd", r.ppd, fmt::format("{:.2f}", r.ppd)});
          add_rate(rec, "viewport_bitrate", r.viewport_bitrate, ctx.mode);
          add_rate(rec, "full_bitrate", r.full_bitrate, ctx.mode);
          rows.push_back(std::move(rec));
        }
        emit_rows(ctx, "table quest2", rows);
      };
    });
  }
  {
    auto* c = tab->add_subcommand("summary", "QoS requirements of the measured and the eye-like experience");
    c->callback([&] {
      action = [&] {
        report::RequirementsReport rep;
        rep.factors.assign(std::begin(profiles::kSummaryFactors), std::end(profiles::kSummaryFactors));
        rep.rows = profiles::reproduce_summary_table(ctx.registry());
        write_report(ctx, rep, "table summary");
      };
    });
  }
}

void setup_report(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* c = app.add_subcommand("report", "Requirement columns for any set of device profiles");
  struct Opts {
    std::string keys = "quest2@72,eye-like";
    std::string factors = "1,20,600";
  };
  auto o = std::make_shared<Opts>();
  c->add_option("--keys", o->keys, "Comma-separated device[@hz] keys")->capture_default_str();
  c->add_option("--factors", o->factors, "Comma-separated compression factors")->capture_default_str();
  c->callback([&, o] {
    action = [&, o] {
      report::ReportOptions opts;
      opts.factors.clear();
      for (const auto& f : split_list(o->factors)) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc{} || ptr != f.data() + f.size()) throw DomainError(fmt::format("bad factor '{}'", f));
        opts.factors.push_back(v);
      }
      write_report(ctx, report::requirements_report(ctx.registry(), split_list(o->keys), opts), "report");
    };
  });
}

// ------------------------------------------------------------------- trace

struct TraceSource {
  StreamOpts stream;
  double duration = 2.0;
  double jitter = 0.0;
  std::optional<std::string> in;

  void attach(CLI::App* app, bool allow_input) {
    stream.attach(app);
    app->add_option("--duration", duration, "Trace length in seconds")->capture_default_str();
    app->add_option("--jitter", jitter, "Multiplicative size jitter in [0, 1)")->capture_default_str();
    if (allow_input) app->add_option("--trace", in, "Read the frame trace from a CSV/JSON file");
  }
  tracegen::FrameTrace build(Context& ctx) const {
    if (in) return tracegen::import_frames(*in);
    const auto* d = ctx.device();
    const auto surface = stream.surface(d);
    const auto sizes = codec::frame_sizes(surface, stream.compression(d));
    return tracegen::generate_trace(sizes, stream.config(d), duration, {jitter, ctx.g.seed});
  }
};

void setup_trace(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* tr = app.add_subcommand("trace", "Synthetic frame and packet traces");
  tr->require_subcommand(1);
  {
    auto* c = tr->add_subcommand("generate", "Per-frame trace from the GOP model");
    auto src = std::make_shared<TraceSource>();
    auto out = std::make_shared<std::optional<std::string>>();
    src->attach(c, false);
    c->add_option("--out", *out, "Output file (default: stdout)");
    c->callback([&, src, out] {
      action = [&, src, out] {
        const auto trace = src->build(ctx);
        std::ofstream file;
        std::ostream& os = open_output(*out, file, *ctx.out);
        tracegen::write_frames(os, trace, trace_format(ctx, *out));
        close_output(*out, file);
      };
    });
  }
  {
    auto* c = tr->add_subcommand("packetize", "Split frames into MTU-sized packets");
    auto src = std::make_shared<TraceSource>();
    auto out = std::make_shared<std::optional<std::string>>();
    auto mtu = std::make_shared<std::int64_t>(1460 * 8);
    src->attach(c, true);
    c->add_option("--mtu", *mtu, "MTU payload in bits")->capture_default_str();
    c->add_option("--out", *out, "Output file (default: stdout)");
    c->callback([&, src, out, mtu] {
      action = [&, src, out, mtu] {
        const auto packets = tracegen::packetize(src->build(ctx), *mtu);
        std::ofstream file;
        std::ostream& os = open_output(*out, file, *ctx.out);
        tracegen::write_packets(os, packets, trace_format(ctx, *out));
        close_output(*out, file);
      };
    });
  }
  {
    auto* c = tr->add_subcommand("export", "Convert a frame trace between CSV and JSON");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::optional<std::string>>();
    c->add_option("--in", *in, "Input trace file")->required();
    c->add_option("--out", *out, "Output file (default: stdout)");
    c->callback([&, in, out] {
      action = [&, in, out] {
        const auto trace = tracegen::import_frames(*in);
        std::ofstream file;
        std::ostream& os = open_output(*out, file, *ctx.out);
        tracegen::write_frames(os, trace, trace_format(ctx, *out));
        close_output(*out, file);
      };
    });
  }
}

// ---------------------------------------------------------------- simulate

json aggregates_json(const netsim::Aggregates& a) {
  return json{{"mean_e2e_ms", a.mean_e2e_ms},       {"p50_e2e_ms", a.p50_e2e_ms},
              {"p95_e2e_ms", a.p95_e2e_ms},         {"p99_e2e_ms", a.p99_e2e_ms},
              {"max_e2e_ms", a.max_e2e_ms},         {"displayed_count", a.displayed_count},
              {"dropped_count", a.dropped_count},   {"mtp_violations", a.mtp_violations},
              {"effective_fps", a.effective_fps}};
}

void setup_simulate(CLI::App& app, Context& ctx, std::function<void()>& action) {
  auto* c = app.add_subcommand("simulate", "Play a frame trace over a link through the MTP pipeline");
  struct Opts {
    TraceSource src;
    TimingOpts timing;
    std::string downlink = "100M", uplink = "10M", rtt = "0ms", transport = "udp";
    double loss = 0.0;
    int max_retx = 3;
    double uplink_payload = 0.0;
    std::int64_t mtu = 1460 * 8;
    std::optional<double> hz;
    std::optional<std::string> mtp, stage, sweep, out;
  };
  auto o = std::make_shared<Opts>();
  o->src.attach(c, true);
  o->timing.attach(c);
  c->add_option("--downlink", o->downlink, "Downlink rate (inf allowed)")->capture_default_str();
  c->add_option("--uplink", o->uplink, "Uplink rate")->capture_default_str();
  c->add_option("--rtt", o->rtt, "Propagation round-trip time")->capture_default_str();
  c->add_option("--loss", o->loss, "Per-packet loss probability")->capture_default_str();
  c->add_option("--transport", o->transport, "udp or tcp")->capture_default_str();
  c->add_option("--max-retx", o->max_retx, "Retransmission rounds for tcp")->capture_default_str();
  c->add_option("--uplink-payload", o->uplink_payload, "Pose message size in bits")->capture_default_str();
  c->add_option("--mtu", o->mtu, "MTU payload in bits")->capture_default_str();
  c->add_option("--hz", o->hz, "Display refresh rate (default: profile or 90)");
  auto* mtp = c->add_option("--mtp", o->mtp, "MTP limit (default 20ms)");
  c->add_option("--stage", o->stage, "Take the MTP limit from a stage key")->excludes(mtp);
  c->add_option("--sweep", o->sweep, "Comma-separated downlink rates run concurrently");
  c->add_option("--out", o->out, "Output file (default: stdout)");
  c->callback([&, o] {
    action = [&, o] {
      const auto trace = o->src.build(ctx);
      netsim::LinkModel link;
      link.downlink_bps = parse_bitrate(o->downlink).bits_per_second;
      link.uplink_bps = parse_bitrate(o->uplink).bits_per_second;
      link.propagation_rtt_ms = parse_duration_ms(o->rtt);
      link.loss_prob = o->loss;
      link.seed = ctx.g.seed;
      if (o->transport == "udp") {
        link.mode = netsim::TransportMode::kUdpLike;
      } else if (o->transport == "tcp") {
        link.mode = netsim::TransportMode::kTcpLike;
      } else {
        throw DomainError(fmt::format("unknown transport '{}' (udp|tcp)", o->transport));
      }
      link.max_retx = o->max_retx;
      link.uplink_payload_bits = o->uplink_payload;
      link.mtu_payload_bits = o->mtu;
      const auto timing = o->timing.resolve(ctx);
      const auto* d = ctx.device();
      const double hz = o->hz ? *o->hz : (d ? d->mode().hz : 90.0);
      double limit = 20.0;
      if (o->stage) {
        limit = latency::mtp_limit_for(ctx.registry(), StageKey::parse(*o->stage));
      } else if (o->mtp) {
        limit = parse_duration_ms(*o->mtp);
      }

      std::ofstream file;
      std::ostream& os = open_output(o->out, file, *ctx.out);

      if (o->sweep) {
        std::vector<netsim::LinkModel> links;
        for (const auto& r : split_list(*o->sweep)) {
          links.push_back(link);
          links.back().downlink_bps = parse_bitrate(r).bits_per_second;
        }
        std::vector<std::future<netsim::SimReport>> jobs;
        for (const auto& l : links) {
          jobs.push_back(std::async(std::launch::async,
                                    [&trace, l, &timing, hz, limit] { return netsim::simulate(trace, l, timing, hz, limit); }));
        }
        std::vector<Record> rows;
        json doc{{"command", "simulate"}, {"units", std::string(to_string(ctx.mode))}, {"sweep", json::array()}};
        for (std::size_t i = 0; i < jobs.size(); ++i) {
          const auto rep = jobs[i].get();
          const auto& a = rep.aggregates;
          doc["sweep"].push_back({{"downlink_bps", links[i].downlink_bps}, {"aggregates", aggregates_json(a)}});
          Record r;
          add_rate(r, "downlink", BitRate{links[i].downlink_bps}, ctx.mode);
          add(r, "mean_e2e_ms", a.mean_e2e_ms);
          add(r, "p95_e2e_ms", a.p95_e2e_ms);
          add(r, "p99_e2e_ms", a.p99_e2e_ms);
          add_int(r, "displayed", a.displayed_count);
          add_int(r, "dropped", a.dropped_count);
          add_int(r, "mtp_violations", a.mtp_violations);
          add(r, "effective_fps", a.effective_fps);
          rows.push_back(std::move(r));
        }
        if (ctx.format == OutFormat::kJson) {
          os << doc.dump(2) << '\n';
        } else {
          std::ostream* saved = ctx.out;
          ctx.out = &os;
          emit_rows(ctx, "simulate", rows);
          ctx.out = saved;
        }
        close_output(o->out, file);
        return;
      }

      const auto rep = netsim::simulate(trace, link, timing, hz, limit);
      switch (ctx.format) {
        case OutFormat::kJson:
          netsim::write_report_json(os, rep);
          break;
        case OutFormat::kCsv:
          netsim::write_report_csv(os, rep);
          break;
        case OutFormat::kText: {
          const auto& a = rep.aggregates;
          Record r;
          add_int(r, "frames", static_cast<std::int64_t>(rep.frames.size()));
          add_int(r, "displayed", a.displayed_count);
          add_int(r, "dropped", a.dropped_count);
          add(r, "mean_e2e_ms", a.mean_e2e_ms);
          add(r, "p50_e2e_ms", a.p50_e2e_ms);
          add(r, "p95_e2e_ms", a.p95_e2e_ms);
          add(r, "p99_e2e_ms", a.p99_e2e_ms);
          add(r, "max_e2e_ms", a.max_e2e_ms);
          add(r, "mtp_limit_ms", rep.mtp_limit_ms);
          add_int(r, "mtp_violations", a.mtp_violations);
          add(r, "effective_fps", a.effective_fps);
          std::ostream* saved = ctx.out;
          ctx.out = &os;
          emit(ctx, "simulate", r);
          ctx.out = saved;
          break;
        }
      }
      close_output(o->out, file);
    };
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"XR requirements modeling and traffic simulation", "xrreq"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  ctx.out = &out;
  app.add_option("--units", ctx.g.units, "Rate prefixes: binary or decimal")
      ->check(CLI::IsMember({"binary", "decimal"}))
      ->capture_default_str();
  app.add_option("--format", ctx.g.format, "Output format: text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--profile", ctx.g.profile, "Device profile supplying defaults");
  app.add_option("--profiles-file", ctx.g.profiles_file, "Extra profile file (env XRREQ_PROFILES)");
  app.add_option("--seed", ctx.g.seed, "Seed for loss draws and size jitter")->capture_default_str();

  std::function<void()> action;
  setup_geometry(app, ctx, action);
  setup_capacity(app, ctx, action);
  setup_gop(app, ctx, action);
  setup_latency(app, ctx, action);
  setup_reliability(app, ctx, action);
  setup_profiles(app, ctx, action);
  setup_table(app, ctx, action);
  setup_report(app, ctx, action);
  setup_trace(app, ctx, action);
  setup_simulate(app, ctx, action);
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'xrreq --help' for usage\n";
    return kExitUsage;
  }

  try {
    ctx.mode = parse_prefix_mode(ctx.g.units);
    ctx.format = ctx.g.format == "json" ? OutFormat::kJson : ctx.g.format == "csv" ? OutFormat::kCsv : OutFormat::kText;
    if (!action) {
      err << "error: no command given\n" << app.help();
      return kExitUsage;
    }
    action();
  } catch (const LookupError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace xrreq::cli

// Acceptance runner: one PASS/FAIL line per criterion.
//
//   xrreq_acceptance <path-to-xrreq> [--only N]
//
// Exit status is non-zero when any selected criterion fails.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "support/oracles.hpp"
#include "xrreq/capacity.hpp"
#include "xrreq/codec.hpp"
#include "xrreq/geometry.hpp"
#include "xrreq/latency.hpp"
#include "xrreq/netsim.hpp"
#include "xrreq/profiles.hpp"
#include "xrreq/reliability.hpp"
#include "xrreq/tracegen.hpp"
#include "xrreq/units.hpp"

using namespace xrreq;

namespace {

// Collects failed checks for one criterion.
struct Checker {
  std::vector<std::string> failures;

  void near(const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) failures.push_back(fmt::format("{}: got {:.10g}, want {} +/- {}", what, got, want, tol));
  }
  void rel(const std::string& what, double got, double want, double frac) {
    if (!(std::abs(got - want) <= frac * std::abs(want))) {
      failures.push_back(fmt::format("{}: got {:.10g}, want {} +/- {}%", what, got, want, frac * 100));
    }
  }
  template <typename A, typename B>
  void eq(const std::string& what, const A& got, const B& want) {
    if (!(got == want)) failures.push_back(fmt::format("{}: got {}, want {}", what, got, want));
  }
  void truth(const std::string& what, bool ok) {
    if (!ok) failures.push_back(what);
  }
};

FovSpec fov(double h, double v) { return FovSpec{Angle{h}, Angle{v}, {}, {}}; }

void quest2_table(Checker& c) {
  const auto rows = profiles::reproduce_quest2_table(profiles::Registry::builtin());
  const std::array<double, 4> ppd{18.8, 17.98, 16.99, 16.99};
  const std::array<double, 4> view{18.44, 18.73, 18.83, 25.11};
  const std::array<double, 4> full{62.85, 63.84, 64.17, 85.56};
  c.eq("row count", rows.size(), 4u);
  for (std::size_t i = 0; i < std::min<std::size_t>(rows.size(), 4); ++i) {
    c.near(fmt::format("{} Hz ppd", rows[i].hz), rows[i].ppd, ppd[i], 0.01);
    c.near(fmt::format("{} Hz viewport Mibps", rows[i].hz), in_units(rows[i].viewport_bitrate, kMi), view[i], 0.01);
    c.near(fmt::format("{} Hz full Mibps", rows[i].hz), in_units(rows[i].full_bitrate, kMi), full[i], 0.01);
  }
}

void summary_table(Checker& c) {
  const auto cols = profiles::reproduce_summary_table(profiles::Registry::builtin());
  c.eq("column count", cols.size(), 2u);
  if (cols.size() != 2) return;
  const std::array<double, 3> quest{10.80 * kGi, 553.08 * kMi, 18.44 * kMi};
  const std::array<double, 3> eye{2.71 * kTi, 138.72 * kGi, 4.62 * kGi};
  for (std::size_t i = 0; i < 3; ++i) {
    c.rel(fmt::format("quest {}:1", cols[0].bitrates[i].first), cols[0].bitrates[i].second.bits_per_second, quest[i],
          0.005);
    c.rel(fmt::format("eye-like {}:1", cols[1].bitrates[i].first), cols[1].bitrates[i].second.bits_per_second, eye[i],
          0.005);
  }
  c.eq("quest loss", fmt::format("{:.2g}", cols[0].loss_rate.value_or(-1)), "7.2e-06");
  c.eq("quest delivery", format_percent(cols[0].delivery_percent.value_or(-1)), "99.99928");
  c.eq("eye-like loss", fmt::format("{:.2g}", cols[1].loss_rate.value_or(-1)), "1e-06");
  c.eq("eye-like delivery", format_percent(cols[1].delivery_percent.value_or(-1)), "99.9999");
}

void eye_like_chain(Checker& c) {
  using capacity::CompressionProfile;
  c.eq("pixels per eye", capacity::eye_like_pixels_per_eye(fov(155, 130), 200.0), 806'000'000.0);
  const BitDepth d{24};
  c.rel("raw Tibps", in_units(capacity::eye_like_capacity(fov(155, 130), 200, d, 77, CompressionProfile::raw()), kTi),
        2.71, 0.005);
  c.rel("sphere Tibps", in_units(capacity::full_sphere_capacity(200, d, 77, CompressionProfile::raw()), kTi), 4.36,
        0.005);
  c.rel("sphere/600 Gibps", in_units(capacity::full_sphere_capacity(200, d, 77, CompressionProfile::overall(600)), kGi),
        7.44, 0.005);
  c.rel("sphere/1200 Gibps",
        in_units(capacity::full_sphere_capacity(200, d, 77, CompressionProfile::overall(1200)), kGi), 3.72, 0.005);
}

void strong_interaction_chain(Checker& c) {
  const auto& dev = profiles::Registry::builtin().device("comfortable");
  codec::RenderSurface s;
  s.per_eye = *dev.per_eye;
  s.fov = dev.fov;
  s.depth = dev.depth;
  c.near("nb_pixels", codec::nb_pixels(s), 10'794'516, 1);
  const auto sizes = codec::frame_sizes(s, dev.compression);
  c.near("I-frame bits", sizes.i_bits, 3'920'114, 2);
  c.near("P-frame bits", sizes.p_bits, 902'814, 2);
  c.rel("bitrate bps", codec::strong_interaction_bitrate(s, codec::GopConfig{}, dev.compression).bits_per_second,
        91'038'101, 0.001);
}

void volumetric(Checker& c) {
  capacity::VoxelSpec v;
  v.voxels_per_frame = 50360;
  const auto raw = capacity::CompressionProfile::raw();
  c.near("30 fps Mibps", in_units(capacity::volumetric_capacity(v, 30, raw), kMi), 103.74, 0.01);
  c.near("90 fps Mibps", in_units(capacity::volumetric_capacity(v, 90, raw), kMi), 311.22, 0.01);
}

void geometry_examples(Checker& c) {
  using namespace geometry;
  c.near("tv ppi", ppi_from_diagonal({1920, 1080}, 40), 55, 1);
  c.near("hmd ppi", ppi({1440, 1600}, {5.01, 5.57}), 287, 1);
  c.near("hmd fov_h", fov_from_physical(5.01, 2.5).degrees, 90, 0.5);
  c.near("hmd fov_v", fov_from_physical(5.57, 2.5).degrees, 96, 0.5);
  c.near("hmd ppd", ppd_from_physical(1440, 5.01, 2.5), 16, 0.5);
  c.eq("1648@97", scale_resolution(1648, Angle{97}, Angle{360}), 6116);
  c.eq("1664@98", scale_resolution(1664, Angle{98}, Angle{180}), 3056);
  c.eq("4096@90", scale_resolution(4096, Angle{90}, Angle{360}), 16384);
}

void latency_examples(Checker& c) {
  c.near("90 Hz max", latency::refresh_delay(90).max_ms, 11.11, 0.01);
  c.near("90 Hz avg", latency::refresh_delay(90).avg_ms, 5.56, 0.01);
  c.near("120 Hz max", latency::refresh_delay(120).max_ms, 8.33, 0.01);
  c.near("120 Hz avg", latency::refresh_delay(120).avg_ms, 4.17, 0.01);
  const auto& reg = profiles::Registry::builtin();
  const std::vector<std::pair<std::string, double>> expected{
      {"mangiante/early/any", 40},          {"mangiante/entry-level/any", 30},
      {"mangiante/advanced/any", 20},       {"mangiante/extreme/any", 10},
      {"huawei2016/pre-VR/weak_2d", 30},    {"hu2020/pre-VR/strong", 10},
      {"hu2020/advanced/strong", 5},        {"huawei2016/entry-level/weak_3d", 20},
      {"huawei2016/advanced/weak_3d", 20},  {"huawei2016/ultimate/weak_3d", 10},
  };
  for (const auto& [key, ms] : expected) c.eq(key, latency::mtp_limit_for(reg, StageKey::parse(key)), ms);
}

void reliability_examples(Checker& c) {
  reliability::LossModel m;
  c.rel("140 Mbps / 20 ms", reliability::max_loss_rate(m, BitRate{140e6}, 0.020), 1.7e-5, 0.02);
  c.rel("62.85e6 bps / 69 ms", reliability::max_loss_rate(m, BitRate{62.85e6}, 0.069), 7.2e-6, 0.02);
  c.eq("delivery 1.7e-5", format_percent(reliability::delivery_success(1.7e-5)), "99.9983");
  c.eq("delivery 1e-6", format_percent(reliability::delivery_success(1e-6)), "99.9999");
}

// Compact versions of the randomized suites; the unit tests hold the
// fuller sets.
void property_suites(Checker& c) {
  constexpr int kCases = 100;
  auto fails = [&](const std::string& name, const std::function<bool()>& body) {
    int bad = 0;
    for (int i = 0; i < kCases; ++i) bad += body() ? 0 : 1;
    if (bad) c.failures.push_back(fmt::format("{}: {} of {} cases failed", name, bad, kCases));
  };

  fails("geometry composition", [] {
    const auto p = oracle::uniform_int(1, 10000);
    const double e = oracle::uniform(0.01, 100), d = oracle::uniform(0.01, 100);
    return geometry::ppd_from_physical(p, e, d) == geometry::ppd_from_fov(p, geometry::fov_from_physical(e, d));
  });

  fails("capacity linearity", [] {
    const Resolution r{oracle::uniform_int(1, 8000), oracle::uniform_int(1, 8000)};
    const double fps = oracle::uniform(1, 240), f = oracle::uniform(1, 1000);
    const auto base = capacity::hmd_capacity(r, BitDepth{12}, fps, capacity::CompressionProfile::overall(f), true);
    const auto two = capacity::hmd_capacity(r, BitDepth{24}, 2 * fps, capacity::CompressionProfile::overall(2 * f), true);
    return two.bits_per_second == 2 * base.bits_per_second;
  });

  fails("GOP brute-force oracle", [] {
    codec::RenderSurface s;
    s.per_eye = {oracle::uniform_int(100, 4000), oracle::uniform_int(100, 4000)};
    s.fov = FovSpec{Angle{oracle::uniform(30, 180)}, Angle{oracle::uniform(30, 180)}, Angle{oracle::uniform(0, 20)},
                    Angle{oracle::uniform(0, 20)}};
    s.depth = BitDepth{static_cast<int>(oracle::uniform_int(8, 36))};
    auto comp = capacity::CompressionProfile::overall(100);
    comp.iframe_factor = oracle::uniform(1, 100);
    comp.pframe_factor = *comp.iframe_factor * oracle::uniform(1, 10);
    const codec::GopConfig cfg{oracle::uniform(0.5, 4), static_cast<double>(oracle::uniform_int(24, 144)),
                               oracle::uniform(0, 0.5), 0};
    const double got = codec::strong_interaction_bitrate(s, cfg, comp).bits_per_second;
    const double want = oracle::gop_bitrate_brute_force(codec::frame_sizes(s, comp), cfg);
    return std::abs(got - want) <= 1e-12 * want;
  });

  fails("trace bit conservation", [] {
    const codec::FrameSizes sz{oracle::uniform(1e4, 5e6), oracle::uniform(1e3, 1e6), std::nullopt};
    const auto t = tracegen::generate_trace(sz, codec::GopConfig{1, 60, 0.1, 0}, 1.0);
    const auto packets = tracegen::packetize(t, oracle::uniform_int(1000, 20000));
    std::int64_t a = 0, b = 0;
    for (const auto& r : t.records) a += r.size_bits;
    for (const auto& p : packets) b += p.size_bits;
    return a == b;
  });

  auto random_link = [] {
    netsim::LinkModel l;
    l.downlink_bps = oracle::uniform(5e7, 2e9);
    l.propagation_rtt_ms = oracle::uniform(0, 30);
    l.loss_prob = oracle::uniform(0, 0.01);
    l.seed = static_cast<std::uint64_t>(oracle::uniform_int(0, 1'000'000));
    l.mode = oracle::uniform_int(0, 1) ? netsim::TransportMode::kTcpLike : netsim::TransportMode::kUdpLike;
    return l;
  };
  auto random_timing = [] {
    return latency::PipelineTiming{oracle::uniform(0, 2), oracle::uniform(0, 8), oracle::uniform(0, 4),
                                   oracle::uniform(0, 4), oracle::uniform(0, 10)};
  };
  const auto trace = tracegen::generate_trace({3920114.0, 902814.0, std::nullopt}, codec::GopConfig{1, 90, 0.1, 0}, 0.5);

  fails("simulator conservation + vsync alignment", [&] {
    const double hz = std::array<double, 4>{72, 80, 90, 120}[oracle::uniform_int(0, 3)];
    const auto rep = netsim::simulate(trace, random_link(), random_timing(), hz, 20);
    if (rep.aggregates.displayed_count + rep.aggregates.dropped_count != static_cast<std::int64_t>(trace.records.size())) {
      return false;
    }
    for (const auto& f : rep.frames) {
      if (f.displayed && std::abs(f.display_ms - static_cast<double>(f.vsync_tick) * 1000.0 / hz) > 1e-9) return false;
    }
    return true;
  });

  fails("simulator closed-form oracle (lossless)", [&] {
    auto l = random_link();
    l.loss_prob = 0;
    const auto t = random_timing();
    const auto rep = netsim::simulate(trace, l, t, 90, 20);
    const auto want = oracle::lossless_playback(trace, l.downlink_bps, l.propagation_rtt_ms, t, 90);
    for (std::size_t k = 0; k < want.size(); ++k) {
      if (!rep.frames[k].displayed || std::abs(rep.frames[k].e2e_ms - want[k].e2e_ms) > 1e-9) return false;
    }
    return true;
  });

  fails("bandwidth monotonicity (pinned loss draws)", [&] {
    auto l = random_link();
    const auto t = random_timing();
    const auto slow = netsim::simulate(trace, l, t, 90, 20);
    l.downlink_bps *= oracle::uniform(1, 4);
    const auto fast = netsim::simulate(trace, l, t, 90, 20);
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
      if (slow.frames[k].displayed != fast.frames[k].displayed) return false;
      if (slow.frames[k].displayed && fast.frames[k].e2e_ms > slow.frames[k].e2e_ms + 1e-9) return false;
    }
    return true;
  });
}

std::string capture(const std::string& command) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(command.c_str(), "r"), pclose);
  if (!pipe) return {};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  return out;
}

void determinism(Checker& c, const std::string& cli) {
  if (cli.empty()) {
    c.failures.push_back("no CLI path given");
    return;
  }
  const std::string cmd = fmt::format(
      "'{}' --format json --seed 42 simulate --duration 2 --downlink 120M --rtt 8ms --loss 0.002 --transport tcp "
      "--jitter 0.1 --pipeline online-mec",
      cli);
  const auto a = capture(cmd);
  const auto b = capture(cmd);
  c.truth("simulate produced output", !a.empty() && a.find("\"aggregates\"") != std::string::npos);
  c.truth("byte-identical JSON", a == b);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::stoi(argv[++i]);
    } else {
      cli = arg;
    }
  }

  const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria{
      {"Quest 2 table reproduction", quest2_table},
      {"QoS summary table reproduction", summary_table},
      {"eye-like worked chain", eye_like_chain},
      {"strong-interaction chain", strong_interaction_chain},
      {"volumetric bitrates", volumetric},
      {"geometry worked examples", geometry_examples},
      {"refresh delays and stage MTP limits", latency_examples},
      {"loss bounds and delivery rates", reliability_examples},
      {"randomized property suites", property_suites},
      {"simulate determinism", [&cli](Checker& c) { determinism(c, cli); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    Checker c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(fmt::format("exception: {}", e.what()));
    }
    std::cout << fmt::format("{} criterion {:>2}: {}", c.failures.empty() ? "PASS" : "FAIL", id, criteria[i].first)
              << '\n';
    for (const auto& f : c.failures) std::cout << "       " << f << '\n';
    failed += c.failures.empty() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

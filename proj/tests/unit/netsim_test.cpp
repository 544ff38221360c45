#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "support/oracles.hpp"
#include "xrreq/errors.hpp"
#include "xrreq/netsim.hpp"

using namespace xrreq;
using namespace xrreq::netsim;

namespace {

tracegen::FrameTrace trace_of(double seconds = 1.0, double fps = 90.0) {
  return tracegen::generate_trace({3920114.0, 902814.0, std::nullopt}, codec::GopConfig{1.0, fps, 0.1, 0}, seconds);
}

LinkModel random_link() {
  LinkModel l;
  l.downlink_bps = oracle::uniform(5e7, 2e9);
  l.uplink_bps = oracle::uniform(1e6, 1e8);
  l.propagation_rtt_ms = oracle::uniform(0.0, 30.0);
  l.loss_prob = oracle::uniform(0.0, 0.01);
  l.seed = static_cast<std::uint64_t>(oracle::uniform_int(0, 1'000'000));
  l.mode = oracle::uniform_int(0, 1) ? TransportMode::kTcpLike : TransportMode::kUdpLike;
  l.max_retx = static_cast<int>(oracle::uniform_int(0, 4));
  return l;
}

latency::PipelineTiming random_timing() {
  return {oracle::uniform(0, 2), oracle::uniform(0, 8), oracle::uniform(0, 4), oracle::uniform(0, 4),
          oracle::uniform(0, 10)};
}

double random_hz() {
  const double options[] = {60, 72, 80, 90, 120, 144};
  return options[oracle::uniform_int(0, 5)];
}

}  // namespace

TEST(Netsim, DegenerateInfiniteLink) {
  LinkModel l;
  l.downlink_bps = std::numeric_limits<double>::infinity();
  const auto rep = simulate(trace_of(), l, {}, 1000.0, 20.0);
  for (const auto& f : rep.frames) {
    ASSERT_TRUE(f.displayed);
    EXPECT_LE(f.e2e_ms, 1.0 + 1e-9);
    EXPECT_NEAR(f.e2e_ms, f.vsync_wait_ms, 1e-9);
  }
}

TEST(Netsim, CertainLossDropsEverything) {
  LinkModel l;
  l.loss_prob = 1.0;
  const auto rep = simulate(trace_of(), l, {}, 90.0, 20.0);
  EXPECT_EQ(rep.aggregates.displayed_count, 0);
  EXPECT_EQ(rep.aggregates.dropped_count, 90);
  EXPECT_EQ(rep.aggregates.effective_fps, 0.0);
}

TEST(Netsim, TcpRetransmitsRecoverLosses) {
  LinkModel l;
  l.downlink_bps = 1e9;
  l.loss_prob = 0.01;
  l.mode = TransportMode::kTcpLike;
  l.max_retx = 5;
  l.propagation_rtt_ms = 2.0;
  const auto rep = simulate(trace_of(), l, {}, 90.0, 20.0);
  EXPECT_EQ(rep.aggregates.dropped_count, 0);
  int retx = 0;
  for (const auto& f : rep.frames) retx += f.retx_count;
  EXPECT_GT(retx, 0);
  l.mode = TransportMode::kUdpLike;
  EXPECT_GT(simulate(trace_of(), l, {}, 90.0, 20.0).aggregates.dropped_count, 0);
}

TEST(Netsim, Errors) {
  EXPECT_THROW(simulate(tracegen::FrameTrace{}, LinkModel{}, {}, 90.0, 20.0), DomainError);
  LinkModel bad;
  bad.loss_prob = 1.5;
  EXPECT_THROW(simulate(trace_of(), bad, {}, 90.0, 20.0), DomainError);
  EXPECT_THROW(simulate(trace_of(), LinkModel{}, {}, 0.0, 20.0), DomainError);
}

TEST(Netsim, LossDrawIsKeyedByIndices) {
  EXPECT_EQ(loss_draw(1, 2, 3, 0), loss_draw(1, 2, 3, 0));
  EXPECT_NE(loss_draw(1, 2, 3, 0), loss_draw(1, 2, 3, 1));
  EXPECT_NE(loss_draw(1, 2, 3, 0), loss_draw(2, 2, 3, 0));
  const double v = loss_draw(9, 9, 9, 9);
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1.0);
}

TEST(Netsim, ReportExports) {
  LinkModel l;
  l.loss_prob = 0.05;
  const auto rep = simulate(trace_of(0.2), l, {}, 90.0, 20.0);
  std::ostringstream csv;
  write_report_csv(csv, rep);
  EXPECT_EQ(csv.str().substr(0, kReportCsvHeader.size()), kReportCsvHeader);
  EXPECT_NE(csv.str().find("\nmetric,value\n"), std::string::npos);
  std::ostringstream json;
  write_report_json(json, rep);
  EXPECT_NE(json.str().find("\"aggregates\""), std::string::npos);
}

TEST(NetsimProperty, Conservation) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const auto trace = trace_of(0.5);
    const auto rep = simulate(trace, random_link(), random_timing(), random_hz(), 20.0);
    EXPECT_EQ(rep.aggregates.displayed_count + rep.aggregates.dropped_count,
              static_cast<std::int64_t>(trace.records.size()));
  }
}

TEST(NetsimProperty, DeterministicFloor) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const auto trace = trace_of(0.5);
    const auto link = random_link();
    const auto t = random_timing();
    const auto rep = simulate(trace, link, t, random_hz(), 20.0);
    for (const auto& f : rep.frames) {
      if (!f.displayed) continue;
      const double floor = t.sum() + static_cast<double>(f.size_bits) / link.downlink_bps * 1000.0 +
                           link.propagation_rtt_ms;
      EXPECT_GE(f.e2e_ms, floor - 1e-9);
    }
  }
}

TEST(NetsimProperty, VsyncAlignment) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const double hz = random_hz();
    const auto rep = simulate(trace_of(0.5), random_link(), random_timing(), hz, 20.0);
    for (const auto& f : rep.frames) {
      if (!f.displayed) continue;
      EXPECT_NEAR(f.display_ms, static_cast<double>(f.vsync_tick) * 1000.0 / hz, 1e-9);
      EXPECT_GE(f.display_ms, f.ready_ms - 1e-9);
      EXPECT_LT(f.display_ms - f.ready_ms, 1000.0 / hz + 1e-9);
    }
  }
}

TEST(NetsimProperty, LosslessMatchesClosedForm) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    auto link = random_link();
    link.loss_prob = 0.0;
    const auto t = random_timing();
    const double hz = random_hz();
    const auto trace = trace_of(0.5, static_cast<double>(oracle::uniform_int(30, 120)));
    const auto rep = simulate(trace, link, t, hz, 20.0);
    const auto want = oracle::lossless_playback(trace, link.downlink_bps, link.propagation_rtt_ms, t, hz);
    ASSERT_EQ(rep.frames.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      ASSERT_TRUE(rep.frames[k].displayed);
      EXPECT_NEAR(rep.frames[k].ready_ms, want[k].ready_ms, 1e-9);
      EXPECT_NEAR(rep.frames[k].e2e_ms, want[k].e2e_ms, 1e-9);
    }
  }
}

TEST(NetsimProperty, MoreBandwidthNeverHurts) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const auto trace = trace_of(0.5);
    auto link = random_link();
    const auto t = random_timing();
    const double hz = random_hz();
    const auto slow = simulate(trace, link, t, hz, 20.0);
    link.downlink_bps *= oracle::uniform(1.0, 4.0);
    const auto fast = simulate(trace, link, t, hz, 20.0);
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
      EXPECT_EQ(slow.frames[k].displayed, fast.frames[k].displayed);
      if (slow.frames[k].displayed) EXPECT_LE(fast.frames[k].e2e_ms, slow.frames[k].e2e_ms + 1e-9);
    }
  }
}

TEST(NetsimProperty, DeterministicAndViolationCount) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const auto trace = trace_of(0.3);
    const auto link = random_link();
    const auto t = random_timing();
    const double limit = oracle::uniform(5.0, 60.0);
    const auto a = simulate(trace, link, t, 90.0, limit);
    const auto b = simulate(trace, link, t, 90.0, limit);
    EXPECT_EQ(a, b);
    std::int64_t over = 0;
    for (const auto& f : a.frames) over += (f.displayed && f.e2e_ms > limit) ? 1 : 0;
    EXPECT_EQ(a.aggregates.mtp_violations, over);
  }
}

#pragma once

#include <cstdint>

#include "xrreq/stage_key.hpp"
#include "xrreq/types.hpp"

namespace xrreq::profiles {
class Registry;
}

namespace xrreq::reliability {

enum class Transport { kTcpBound, kUdpRequirement };

struct LossModel {
  std::int64_t mss_bits = 1460 * 8;
  Transport transport = Transport::kTcpBound;
};

// Largest loss rate L at which a TCP flow still sustains `throughput`
// given the round trip, from throughput ~ MSS / (RTT * sqrt(L)). Clamped
// to 1 for tiny bandwidth-delay products.
double max_loss_rate(const LossModel& model, BitRate throughput, double rtt_s);

// Packet delivery success in percent.
double delivery_success(double loss_rate);
double loss_from_delivery(double percent);

// Loss bounds are upper bounds; for presentation they are rounded down
// to `digits` significant digits so the printed bound never exceeds the
// computed one.
double conservative_loss_bound(double loss_rate, int digits = 2);

// Registered maximum loss rate; LookupError otherwise.
double required_loss_rate(const profiles::Registry& registry, const StageKey& key);

}  // namespace xrreq::reliability

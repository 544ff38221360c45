#include "xrreq/reliability.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "xrreq/errors.hpp"
#include "xrreq/profiles.hpp"

namespace xrreq::reliability {

double max_loss_rate(const LossModel& model, BitRate throughput, double rtt_s) {
  if (model.transport != Transport::kTcpBound) {
    throw DomainError("the loss bound applies to TCP flows; use required_loss_rate for UDP services");
  }
  if (model.mss_bits <= 0) throw DomainError("MSS must be positive");
  if (!(throughput.bits_per_second > 0.0)) throw DomainError("throughput must be positive");
  if (!(rtt_s > 0.0)) throw DomainError("round-trip time must be positive");
  const double ratio = static_cast<double>(model.mss_bits) / (throughput.bits_per_second * rtt_s);
  return std::min(1.0, ratio * ratio);
}

double delivery_success(double loss_rate) {
  if (!(loss_rate >= 0.0 && loss_rate <= 1.0)) {
    throw DomainError(fmt::format("loss rate must lie in [0, 1] (got {})", loss_rate));
  }
  return (1.0 - loss_rate) * 100.0;
}

double loss_from_delivery(double percent) {
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw DomainError(fmt::format("delivery rate must lie in [0, 100] (got {})", percent));
  }
  return 1.0 - percent / 100.0;
}

double conservative_loss_bound(double loss_rate, int digits) {
  if (!(loss_rate > 0.0)) return loss_rate;
  if (digits < 1) throw DomainError("need at least one significant digit");
  const double exponent = std::floor(std::log10(loss_rate)) - (digits - 1);
  const double scale = std::pow(10.0, exponent);
  // The relative nudge keeps exact decimals (7.2e-6) from flooring one
  // step low after the division rounds.
  const double mantissa = std::floor(loss_rate / scale * (1.0 + 1e-12));
  return mantissa * scale;
}

double required_loss_rate(const profiles::Registry& registry, const StageKey& key) {
  return registry.loss_limit(key);
}

}  // namespace xrreq::reliability

#include "hopcap/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hopcap/error.hpp"

namespace hopcap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void RadioParams::validate() const {
  if (!(power > 0.0)) {
    throw ConfigError("radio.power must be positive");
  }
  if (!(noise >= 0.0)) {
    throw ConfigError("radio.noise must be non-negative");
  }
  if (!(alpha > 2.0)) {
    throw ConfigError("radio.alpha must exceed 2");
  }
}

double RadioParams::received_power(double distance) const {
  return power * std::pow(distance, -alpha);
}

double sinr(const SpherePoint& receiver, const SpherePoint& transmitter,
            std::span<const SpherePoint> interferers, const RadioParams& radio) {
  const double d = surface_distance(transmitter, receiver);
  if (!(d > 0.0)) {
    throw GeometryError("sinr: transmitter and receiver coincide");
  }
  double interference = radio.noise;
  for (const auto& k : interferers) {
    const double dk = surface_distance(k, receiver);
    if (!(dk > 0.0)) {
      return 0.0;
    }
    interference += radio.received_power(dk);
  }
  const double signal = radio.received_power(d);
  if (interference == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return signal / interference;
}

LinkModel::LinkModel(Variant v) : v_(v) {
  std::visit(overloaded{
                 [](const ThresholdLink& t) {
                   if (!(t.beta > 0.0)) {
                     throw ConfigError("threshold link: beta must be positive");
                   }
                 },
                 [](const ConstantLink& c) {
                   if (!(c.p > 0.0 && c.p < 1.0)) {
                     throw ConfigError("constant_p link: p must lie in (0, 1)");
                   }
                 },
                 [](const BpskPacketLink& b) {
                   if (b.bits < 1) {
                     throw ConfigError("bpsk_packet link: bits must be >= 1");
                   }
                 },
                 [](const LogisticLink& l) {
                   if (!(l.slope > 0.0) || !std::isfinite(l.midpoint_db)) {
                     throw ConfigError("logistic link: slope must be positive");
                   }
                 },
             },
             v_);
}

double LinkModel::success_probability(double gamma) const {
  return std::visit(
      overloaded{
          [&](const ThresholdLink& t) { return gamma >= t.beta ? 1.0 : 0.0; },
          [&](const ConstantLink& c) { return c.p; },
          [&](const BpskPacketLink& b) {
            if (!(gamma > 0.0)) {
              return std::pow(0.5, b.bits);
            }
            const double ber = 0.5 * std::erfc(std::sqrt(gamma));
            return std::exp(b.bits * std::log1p(-ber));
          },
          [&](const LogisticLink& l) {
            if (!(gamma > 0.0)) {
              return 0.0;
            }
            const double db = 10.0 * std::log10(gamma);
            return 1.0 / (1.0 + std::exp(-l.slope * (db - l.midpoint_db)));
          },
      },
      v_);
}

std::string LinkModel::name() const {
  return std::visit(overloaded{
                        [](const ThresholdLink&) { return std::string("threshold"); },
                        [](const ConstantLink&) { return std::string("constant_p"); },
                        [](const BpskPacketLink&) { return std::string("bpsk_packet"); },
                        [](const LogisticLink&) { return std::string("logistic"); },
                    },
                    v_);
}

bool LinkModel::continuous() const {
  return std::holds_alternative<BpskPacketLink>(v_) || std::holds_alternative<LogisticLink>(v_);
}

double hop_success_with_retries(std::span<const double> gammas, const LinkModel& model,
                                int attempts) {
  if (attempts < 1) {
    throw ArgumentError("hop_success_with_retries: attempt budget must be >= 1");
  }
  if (gammas.empty()) {
    throw ArgumentError("hop_success_with_retries: need at least one SINR");
  }
  double all_fail = 1.0;
  for (int i = 0; i < attempts; ++i) {
    const double g = gammas[std::min<std::size_t>(static_cast<std::size_t>(i), gammas.size() - 1)];
    all_fail *= 1.0 - model.success_probability(g);
  }
  return 1.0 - all_fail;
}

}  // namespace hopcap

#pragma once

#include <span>
#include <string>
#include <variant>

#include "hopcap/sphere.hpp"

namespace hopcap {

struct RadioParams {
  double power = 1.0;
  double noise = 1e-9;
  double alpha = 3.0;  // path-loss exponent, > 2

  // Throws ConfigError unless power > 0, noise >= 0 and alpha > 2.
  void validate() const;
  // Received power P * d^-alpha at surface distance d.
  double received_power(double distance) const;
};

// SINR at `receiver` for a transmission from `transmitter`, with every
// point of `interferers` transmitting concurrently:
//   P d_tr^-a / (N + sum_k P d_kr^-a).
// Throws GeometryError for a zero transmitter-receiver distance.
double sinr(const SpherePoint& receiver, const SpherePoint& transmitter,
            std::span<const SpherePoint> interferers, const RadioParams& radio);

// Packet-success maps phi: SINR -> [0, 1].
struct ThresholdLink {
  double beta = 10.0;
};
struct ConstantLink {
  double p = 0.9;
};
struct BpskPacketLink {
  int bits = 1024;
};
struct LogisticLink {
  double slope = 1.0;
  double midpoint_db = 10.0;
};

class LinkModel {
 public:
  using Variant = std::variant<ThresholdLink, ConstantLink, BpskPacketLink, LogisticLink>;

  LinkModel() = default;
  // Throws ConfigError for out-of-range parameters.
  explicit LinkModel(Variant v);

  static LinkModel threshold(double beta) { return LinkModel(ThresholdLink{beta}); }
  static LinkModel constant(double p) { return LinkModel(ConstantLink{p}); }
  static LinkModel bpsk_packet(int bits) { return LinkModel(BpskPacketLink{bits}); }
  static LinkModel logistic(double slope = 1.0, double midpoint_db = 10.0) {
    return LinkModel(LogisticLink{slope, midpoint_db});
  }

  double success_probability(double gamma) const;

  // "threshold" | "constant_p" | "bpsk_packet" | "logistic"
  std::string name() const;
  // Threshold and constant-p deliberately break continuity; they reproduce
  // the two limiting models (ideal link, lossy link).
  bool continuous() const;
  const Variant& variant() const noexcept { return v_; }

 private:
  Variant v_ = LogisticLink{};
};

inline double success_probability(double gamma, const LinkModel& model) {
  return model.success_probability(gamma);
}

// Probability that a hop succeeds within `attempts` tries given the per-try
// SINRs: 1 - prod_i (1 - phi(gamma_i)); the last SINR repeats if the sequence
// is shorter than the budget. Throws ArgumentError for attempts < 1 or an
// empty sequence.
double hop_success_with_retries(std::span<const double> gammas, const LinkModel& model,
                                int attempts);

}  // namespace hopcap

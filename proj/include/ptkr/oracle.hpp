#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ptkr/classical.hpp"
#include "ptkr/core.hpp"

namespace ptkr {

/// Minimum-uncertainty Gaussian described by its center and widths.
struct GaussianPacket {
  double theta_bar = accelerator_angle;
  double p_bar = 0;
  double dtheta = 0;
  double dp = 0;

  [[nodiscard]] double uncertainty() const noexcept { return dtheta * dp; }
};

struct Validity {
  bool valid = false;
  double gain_ratio = 0;  // lambda K / hbar
  double kick_ratio = 0;  // K / hbar
};

/// Both lambda K / hbar and K / hbar must reach `threshold` for the packet picture to hold.
inline Validity validity_check(const SystemParams& p, double threshold = 10.0) {
  Validity v;
  v.gain_ratio = p.gain_strength() * p.kick_strength() / p.hbar();
  v.kick_ratio = p.kick_strength() / p.hbar();
  v.valid = v.gain_ratio >= threshold && v.kick_ratio >= threshold;
  return v;
}

/// Widths the gain imprints on the packet each period: sqrt(hbar / 2 lambda K) and sqrt(hbar lambda K / 2).
inline std::pair<double, double> packet_widths(const SystemParams& p) {
  const double lk = p.gain_strength() * p.kick_strength();
  if (!(lk > 0.0)) throw DomainError("packet widths need lambda K > 0");
  return {std::sqrt(p.hbar() / (2.0 * lk)), std::sqrt(p.hbar() * lk / 2.0)};
}

inline GaussianPacket initial_packet(const SystemParams& p) {
  const auto [dth, dp] = packet_widths(p);
  return {accelerator_angle, 0.0, dth, dp};
}

/// One period of the real kick, free flight and gain acting on the packet center.
///
/// The kicked momentum p_bar + K is split as 2 n0 pi + Delta with Delta in (-pi, pi];
/// the gain then re-centers the packet at (pi/2 + 2 n0 pi, 2 n0 pi).
inline GaussianPacket propagate_packet(const GaussianPacket& g, const SystemParams& p, double capture = pi) {
  if (!validity_check(p).valid)
    throw DomainError("packet propagation outside its validity regime (lambda K/hbar or K/hbar below 10)");
  if (std::abs(wrap_angle(g.theta_bar - accelerator_angle)) >= capture)
    throw CaptureRangeError("packet center is not near pi/2");
  const double pk = g.p_bar + p.kick_strength();
  double n0 = std::round(pk / two_pi);
  double delta = pk - two_pi * n0;
  if (delta <= -pi) {
    delta += two_pi;
    n0 -= 1;
  }
  if (std::abs(delta) >= capture)
    throw CaptureRangeError("kicked momentum misses 2 n pi by " + std::to_string(delta) + ", outside the capture range");
  const auto [dth, dp] = packet_widths(p);
  return {accelerator_angle + two_pi * n0, two_pi * n0, dth, dp};
}

struct OracleTrajectory {
  std::vector<GaussianPacket> packets;  // j_kicks + 1 entries
  double D = 0;                         // constant per-kick momentum increment
};

inline OracleTrajectory oracle_trajectory(const SystemParams& p, int j_kicks, double capture = pi) {
  if (j_kicks < 1) throw InvalidArgument("oracle trajectory needs at least one kick");
  OracleTrajectory out;
  out.packets.push_back(initial_packet(p));
  for (int j = 0; j < j_kicks; ++j) out.packets.push_back(propagate_packet(out.packets.back(), p, capture));
  out.D = out.packets[1].p_bar - out.packets[0].p_bar;
  return out;
}

}  // namespace ptkr

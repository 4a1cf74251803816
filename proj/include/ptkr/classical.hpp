#pragma once

#include <cmath>
#include <vector>

#include "ptkr/core.hpp"

namespace ptkr {

/// Point of the standard map with unwrapped angle and momentum.
struct ClassicalState {
  double theta = 0;
  double p = 0;

  friend bool operator==(const ClassicalState&, const ClassicalState&) = default;
};

/// p' = p + K sin(theta), theta' = theta + p'.
inline ClassicalState standard_map_step(const ClassicalState& s, double kick) {
  const double p = s.p + kick * std::sin(s.theta);
  return {s.theta + p, p};
}

inline constexpr double accelerator_angle = pi / 2;

struct SnapResult {
  ClassicalState state;
  bool snapped = false;
};

/// Standard map followed by the gain-loss re-centering.
///
/// When the new angle lies within `capture` of pi/2 (mod 2 pi) the gain
/// pulls the orbit back onto the accelerator mode: theta snaps to the
/// nearest pi/2 + 2 pi k and p to the nearest multiple of 2 pi.
inline SnapResult gain_loss_step(const ClassicalState& s, double kick, double capture = pi) {
  ClassicalState next = standard_map_step(s, kick);
  if (std::abs(wrap_angle(next.theta - accelerator_angle)) >= capture) return {next, false};
  next.theta = accelerator_angle + two_pi * std::round((next.theta - accelerator_angle) / two_pi);
  next.p = two_pi * std::round(next.p / two_pi);
  return {next, true};
}

struct Trajectory {
  std::vector<ClassicalState> states;  // n_kicks + 1 entries, states[0] is the start
  std::vector<double> increments;      // p_{j+1} - p_j
  std::vector<char> snapped;

  [[nodiscard]] std::size_t kicks() const noexcept { return increments.size(); }
};

inline Trajectory iterate_map(ClassicalState start, double kick, int n_kicks, bool with_gain = true,
                              double capture = pi) {
  if (n_kicks < 0) throw InvalidArgument("n_kicks must be >= 0");
  Trajectory tr;
  tr.states.reserve(static_cast<std::size_t>(n_kicks) + 1);
  tr.states.push_back(start);
  for (int j = 0; j < n_kicks; ++j) {
    const ClassicalState& cur = tr.states.back();
    SnapResult r = with_gain ? gain_loss_step(cur, kick, capture) : SnapResult{standard_map_step(cur, kick), false};
    tr.increments.push_back(r.state.p - cur.p);
    tr.snapped.push_back(r.snapped ? 1 : 0);
    tr.states.push_back(r.state);
  }
  return tr;
}

/// D = 2 pi round(K / 2 pi): the accelerator mode captured for K within pi of 2 n pi.
inline double acceleration_rate_prediction(double kick) {
  if (!(kick > 0.0)) throw InvalidArgument("kick strength must be > 0");
  return two_pi * std::round(kick / two_pi);
}

/// Least-squares slope of p against kick number for the snapped orbit from (pi/2, 0).
inline double classical_D(double kick, int n_kicks = 200, double capture = pi) {
  if (n_kicks < 100) throw InvalidArgument("classical_D needs n_kicks >= 100");
  const Trajectory tr = iterate_map({accelerator_angle, 0.0}, kick, n_kicks, true, capture);
  std::vector<double> t(tr.states.size()), p(tr.states.size());
  for (std::size_t j = 0; j < tr.states.size(); ++j) {
    t[j] = static_cast<double>(j);
    p[j] = tr.states[j].p;
  }
  return least_squares_slope(t, p);
}

}  // namespace ptkr

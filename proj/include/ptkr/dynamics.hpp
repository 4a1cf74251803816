#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ptkr/core.hpp"

namespace ptkr {

/// Order of the three factors within one kick period.
///
/// `free_then_kick`: U = exp(-i V_K / hbar) exp(-i p^2 / 2 hbar).
/// `gain_last`:      U = U_K^i U_f U_K^r, the cyclically rotated product the
///                   Gaussian-packet oracle is derived for; same spectrum.
enum class StepOrder { free_then_kick, gain_last };

inline std::string to_string(StepOrder o) {
  return o == StepOrder::free_then_kick ? "free_then_kick" : "gain_last";
}

inline StepOrder parse_step_order(const std::string& s) {
  if (s == "free_then_kick" || s == "standard") return StepOrder::free_then_kick;
  if (s == "gain_last" || s == "reordered") return StepOrder::gain_last;
  throw InvalidArgument("unknown step order '" + s + "' (expected free_then_kick|gain_last)");
}

/// exp(-i hbar n^2 / 2) for every lattice site.
inline ComplexVector free_phases(const MomentumLattice& lattice) {
  ComplexVector out(lattice.size());
  constexpr long double two_pi_l = 6.283185307179586476925286766559L;
  for (int i = 0; i < lattice.size(); ++i) {
    const long double n = lattice.index(i);
    // hbar n^2 / 2 reaches ~1e9 on large lattices; reduce in extended precision
    const long double phase = std::fmod(static_cast<long double>(lattice.hbar()) * n * n / 2.0L, two_pi_l);
    out[i] = std::polar(1.0, -static_cast<double>(phase));
  }
  return out;
}

/// Gain exponents above this are shifted by their maximum before exp().
/// Half the double range, since norms square the amplitudes.
inline constexpr double gain_overflow_threshold = 300.0;

/// Split-operator Floquet map with precomputed phase and kick factors.
///
/// Holds its own FFT scratch space, so a propagator must not be shared
/// between threads; give each worker its own.
class FloquetPropagator {
 public:
  explicit FloquetPropagator(const SystemParams& params, StepOrder order = StepOrder::free_then_kick)
      : params_(params),
        order_(order),
        lattice_(params),
        transform_(params.basis_size(), params.kick_grid_size()) {
    const int m = params.kick_grid_size();
    const double k = params.kick_strength();
    const double hb = params.hbar();
    const double gain_scale = k * params.gain_strength() / hb;

    free_phase_ = free_phases(lattice_);

    gain_log_offset_ = gain_scale > gain_overflow_threshold ? gain_scale : 0.0;
    const AngleGrid grid(m);
    real_kick_.resize(m);
    gain_.resize(m);
    full_kick_.resize(m);
    for (int j = 0; j < m; ++j) {
      const double th = grid.theta(j);
      real_kick_[j] = std::polar(1.0, -k * std::cos(th) / hb);
      gain_[j] = std::exp(gain_scale * std::sin(th) - gain_log_offset_);
      full_kick_[j] = real_kick_[j] * gain_[j];
    }
  }

  [[nodiscard]] const SystemParams& params() const noexcept { return params_; }
  [[nodiscard]] StepOrder order() const noexcept { return order_; }
  [[nodiscard]] const MomentumLattice& lattice() const noexcept { return lattice_; }

  /// psi_n <- psi_n exp(-i p_n^2 / (2 hbar)).
  void apply_free(MomentumState& s) const {
    check(s);
    s.amplitudes.array() *= free_phase_.array();
  }

  /// Full kick exp(-i V_K(theta) / hbar) applied on the kick grid.
  void apply_kick(MomentumState& s) {
    multiply_in_angle(s, [&](int j) { return full_kick_[j]; });
    s.log_norm += gain_log_offset_;
  }

  /// Real part of the kick only: exp(-i K cos(theta) / hbar).
  void apply_real_kick(MomentumState& s) {
    multiply_in_angle(s, [&](int j) { return real_kick_[j]; });
  }

  /// Gain/loss factor only: exp(K lambda sin(theta) / hbar).
  void apply_gain(MomentumState& s) {
    multiply_in_angle(s, [&](int j) { return cplx(gain_[j], 0.0); });
    s.log_norm += gain_log_offset_;
  }

  /// One kick period; ends with unit stored norm when `renormalize` is set.
  void step(MomentumState& s, bool renormalize = true) {
    if (order_ == StepOrder::free_then_kick) {
      apply_free(s);
      apply_kick(s);
    } else {
      apply_real_kick(s);
      apply_free(s);
      apply_gain(s);
    }
    if (renormalize) s.renormalize();
  }

 private:
  void check(const MomentumState& s) const {
    if (!(s.lattice == lattice_))
      throw SizeError("state lattice does not match the propagator's parameters");
  }

  template <class Factor>
  void multiply_in_angle(MomentumState& s, Factor&& factor) {
    check(s);
    std::span<cplx> amps(s.amplitudes.data(), static_cast<std::size_t>(s.amplitudes.size()));
    transform_.to_angle(amps);
    auto buf = transform_.samples();
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= factor(static_cast<int>(j));
    transform_.to_momentum(amps);
  }

  SystemParams params_;
  StepOrder order_;
  MomentumLattice lattice_;
  SpectralTransform transform_;
  ComplexVector free_phase_;
  std::vector<cplx> real_kick_;
  std::vector<double> gain_;
  std::vector<cplx> full_kick_;
  double gain_log_offset_ = 0.0;
};

inline MomentumState apply_free(MomentumState s, const SystemParams& params) {
  FloquetPropagator(params).apply_free(s);
  return s;
}

inline MomentumState apply_kick(MomentumState s, const SystemParams& params) {
  FloquetPropagator(params).apply_kick(s);
  return s;
}

inline MomentumState step(MomentumState s, const SystemParams& params, bool renormalize = true,
                          StepOrder order = StepOrder::free_then_kick) {
  FloquetPropagator(params, order).step(s, renormalize);
  return s;
}

// ---------------------------------------------------------------------------
// Observables

/// Normalized moments of the momentum distribution of a state.
struct Moments {
  double weight = 0;         // sum |psi_n|^2 of the stored amplitudes
  double mean_p = 0;         // <p>
  double mean_p2 = 0;        // <p^2>
  double participation = 0;  // 1 / sum |psi_n|^4 with psi normalized
};

inline Moments moments(const MomentumState& s) {
  double w = 0, w1 = 0, w2 = 0, w4 = 0;
  const auto& lat = s.lattice;
  for (int i = 0; i < lat.size(); ++i) {
    const double prob = std::norm(s.amplitudes[i]);
    const double p = lat.momentum(i);
    w += prob;
    w1 += p * prob;
    w2 += p * p * prob;
    w4 += prob * prob;
  }
  if (!(w > 0.0)) throw DegenerateStateError("state has zero norm");
  return {w, w1 / w, w2 / w, w * w / w4};
}

/// <p> = sum p_n |psi_n|^2 / sum |psi_n|^2; blind to log_norm.
inline double mean_momentum(const MomentumState& s) { return moments(s).mean_p; }

inline double participation_number(const MomentumState& s) { return moments(s).participation; }

/// Fraction of probability on the outermost `fraction` of lattice sites at each end.
inline double edge_weight(const MomentumState& s, double fraction = 0.02) {
  const int n = s.lattice.size();
  const int band = std::max(1, static_cast<int>(std::ceil(fraction * n)));
  double edge = 0, total = 0;
  for (int i = 0; i < n; ++i) {
    const double prob = std::norm(s.amplitudes[i]);
    total += prob;
    if (i < band || i >= n - band) edge += prob;
  }
  if (!(total > 0.0)) throw DegenerateStateError("state has zero norm");
  return edge / total;
}

// ---------------------------------------------------------------------------
// Time evolution

struct EvolveConfig {
  int n_kicks = 1000;
  int record_every = 1;
  bool renormalize = true;
  StepOrder order = StepOrder::free_then_kick;
  /// Edge band (per side) and probability that raise the truncation warning.
  double edge_fraction = 0.02;
  double edge_tolerance = 1e-8;

  void validate() const {
    if (n_kicks < 1) throw InvalidArgument("n_kicks must be >= 1");
    if (record_every < 1) throw InvalidArgument("record_every must be >= 1");
  }
};

struct CurrentRecord {
  long t = 0;
  double mean_p = 0;
  double log_norm = 0;  // log of the true 2-norm
  double participation = 0;
  double mean_p2 = 0;
};

struct CurrentSeries {
  std::vector<CurrentRecord> records;
  bool truncation_warning = false;
  long first_truncation_kick = -1;
  double max_edge_weight = 0;

  [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
  [[nodiscard]] long final_kick() const { return records.empty() ? 0 : records.back().t; }
};

inline CurrentRecord record_of(const MomentumState& s, long t) {
  const Moments m = moments(s);
  return {t, m.mean_p, s.log_norm + 0.5 * std::log(m.weight), m.participation, m.mean_p2};
}

/// Iterates the Floquet map from `initial`, recording every `record_every` kicks (t = 0 included).
inline CurrentSeries evolve(MomentumState initial, const SystemParams& params, const EvolveConfig& config,
                            MomentumState* final_state = nullptr) {
  config.validate();
  FloquetPropagator prop(params, config.order);
  MomentumState& s = initial;
  CurrentSeries series;
  series.records.reserve(static_cast<std::size_t>(config.n_kicks / config.record_every + 1));
  series.records.push_back(record_of(s, 0));
  for (long t = 1; t <= config.n_kicks; ++t) {
    prop.step(s, config.renormalize);
    const double edge = edge_weight(s, config.edge_fraction);
    series.max_edge_weight = std::max(series.max_edge_weight, edge);
    if (edge >= config.edge_tolerance && !series.truncation_warning) {
      series.truncation_warning = true;
      series.first_truncation_kick = t;
    }
    if (t % config.record_every == 0) series.records.push_back(record_of(s, t));
  }
  if (final_state != nullptr) *final_state = s;
  return series;
}

/// Least-squares slope of <p> against t over the final `window` kicks.
inline double measure_acceleration_rate(const CurrentSeries& series, long window) {
  if (series.truncation_warning)
    throw TruncationError("wavefunction reached the lattice edge at kick " +
                          std::to_string(series.first_truncation_kick) + "; acceleration rate not measured");
  if (window < 50) throw InvalidArgument("fit window must be >= 50 kicks");
  const long t_end = series.final_kick();
  if (window > t_end) throw InvalidArgument("fit window longer than the series");
  std::vector<double> t, p;
  for (const auto& r : series.records) {
    if (r.t >= t_end - window) {
      t.push_back(static_cast<double>(r.t));
      p.push_back(r.mean_p);
    }
  }
  return least_squares_slope(t, p);
}

/// Default fit window: the final half of the series.
inline double measure_acceleration_rate(const CurrentSeries& series) {
  return measure_acceleration_rate(series, series.final_kick() / 2);
}

/// <p^2>(t_f) / t_f, kept as a diagnostic next to the first-moment slope.
inline double second_moment_ratio(const CurrentSeries& series) {
  if (series.final_kick() <= 0) throw InvalidArgument("series has no kicks");
  return series.records.back().mean_p2 / static_cast<double>(series.final_kick());
}

/// Lattice size keeping |p| <= max_abs_momentum inside the inner `inner_fraction` of the lattice.
inline int lattice_size_for(double max_abs_momentum, double hbar, double inner_fraction = 0.8) {
  if (!(inner_fraction > 0.0 && inner_fraction <= 1.0)) throw InvalidArgument("inner fraction must be in (0, 1]");
  const double sites = 2.0 * std::abs(max_abs_momentum) / (hbar * inner_fraction);
  return fft_friendly_size(static_cast<long>(std::ceil(sites)) + 2);
}

// ---------------------------------------------------------------------------
// Staircase analysis

struct Plateau {
  long t_begin = 0;
  long t_end = 0;
  double value = 0;  // median <p> over the segment
};

/// Segments where the least-squares slope of <p> over every `min_length`-kick
/// window they contain stays below `max_slope` in magnitude.
inline std::vector<Plateau> find_plateaus(const CurrentSeries& series, double max_slope = 0.02, long min_length = 30) {
  const auto& rec = series.records;
  std::vector<Plateau> out;
  if (rec.size() < 2) return out;
  const long step = rec.size() > 1 ? rec[1].t - rec[0].t : 1;
  const long w = std::max<long>(2, min_length / step + 1);  // points per window
  if (static_cast<long>(rec.size()) < w) return out;
  std::vector<char> flat(rec.size(), 0);
  std::vector<double> t(w), p(w);
  for (std::size_t a = 0; a + w <= rec.size(); ++a) {
    for (long k = 0; k < w; ++k) {
      t[k] = static_cast<double>(rec[a + k].t);
      p[k] = rec[a + k].mean_p;
    }
    if (std::abs(least_squares_slope(t, p)) < max_slope)
      for (long k = 0; k < w; ++k) flat[a + k] = 1;
  }
  for (std::size_t i = 0; i < rec.size();) {
    if (!flat[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::vector<double> vals;
    while (j < rec.size() && flat[j]) vals.push_back(rec[j++].mean_p);
    // median: windows straddling a step leak a few ramp points into the run
    const auto mid = vals.begin() + static_cast<std::ptrdiff_t>(vals.size() / 2);
    std::nth_element(vals.begin(), mid, vals.end());
    double value = *mid;
    if (vals.size() % 2 == 0) value = 0.5 * (value + *std::max_element(vals.begin(), mid));
    out.push_back({rec[i].t, rec[j - 1].t, value});
    i = j;
  }
  return out;
}

/// Kicks for <p> to go from 10% to 90% of the way between two plateaus.
/// Returns -1 if the series never crosses both levels after `from.t_end`.
inline long rise_time(const CurrentSeries& series, const Plateau& from, const Plateau& to) {
  const double lo = from.value + 0.1 * (to.value - from.value);
  const double hi = from.value + 0.9 * (to.value - from.value);
  const bool up = to.value > from.value;
  long t_lo = -1, t_hi = -1;
  for (const auto& r : series.records) {
    if (r.t < from.t_end || r.t > to.t_end) continue;
    const bool past_lo = up ? r.mean_p >= lo : r.mean_p <= lo;
    const bool past_hi = up ? r.mean_p >= hi : r.mean_p <= hi;
    // last entry into the band before the final crossing
    if (!past_lo) {
      t_lo = -1;
    } else if (t_lo < 0) {
      t_lo = r.t;
    }
    if (past_hi && t_lo >= 0) {
      t_hi = r.t;
      break;
    }
  }
  return (t_lo >= 0 && t_hi >= 0) ? t_hi - t_lo : -1;
}

}  // namespace ptkr

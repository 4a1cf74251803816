#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <string>
#include <utility>
#include <vector>

#include "ptkr/classical.hpp"
#include "ptkr/core.hpp"
#include "ptkr/dynamics.hpp"
#include "ptkr/experiments/config.hpp"
#include "ptkr/experiments/table.hpp"
#include "ptkr/oracle.hpp"
#include "ptkr/parallel.hpp"
#include "ptkr/spectrum.hpp"

#ifndef PTKR_VERSION
#define PTKR_VERSION "0.0.0"
#endif

namespace ptkr::experiments {

/// Pulls typed settings out of a Config and remembers each resolved value,
/// so the exact configuration can be echoed into the output metadata.
class Resolver {
 public:
  Resolver(const Config& cfg, std::string kind) : cfg_(cfg), quick_(cfg.get_bool("quick", false)) {
    record("kind", std::move(kind));
    record("quick", quick_ ? "true" : "false");
  }

  [[nodiscard]] bool quick() const noexcept { return quick_; }

  double real(const std::string& key, double full, double quick_value) {
    const double v = cfg_.get_double(key, quick_ ? quick_value : full);
    record(key, format_real(v));
    return v;
  }
  double real(const std::string& key, double v) { return real(key, v, v); }

  int integer(const std::string& key, int full, int quick_value) {
    const int v = cfg_.get_int(key, quick_ ? quick_value : full);
    record(key, std::to_string(v));
    return v;
  }
  int integer(const std::string& key, int v) { return integer(key, v, v); }

  bool flag(const std::string& key, bool full, bool quick_value) {
    const bool v = cfg_.get_bool(key, quick_ ? quick_value : full);
    record(key, v ? "true" : "false");
    return v;
  }
  bool flag(const std::string& key, bool v) { return flag(key, v, v); }

  std::string text(const std::string& key, const std::string& v) {
    std::string s = cfg_.get_string(key, v);
    record(key, s);
    return s;
  }

  std::vector<double> list(const std::string& key, std::vector<double> full, std::vector<double> quick_value) {
    auto v = cfg_.get_list(key, quick_ ? std::move(quick_value) : std::move(full));
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
    record(key, s);
    return v;
  }
  std::vector<double> list(const std::string& key, std::vector<double> v) { return list(key, v, v); }

  /// Settings read through the config but not part of the result (worker count, output path).
  int workers() { return worker_count(cfg_.get_int("workers", 0)); }
  std::string output(const std::string& fallback) { return cfg_.get_string("out", fallback); }
  bool timestamp() { return cfg_.get_bool("timestamp", false); }

  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& echo() const noexcept { return echo_; }

 private:
  void record(const std::string& key, std::string value) {
    for (auto& [k, v] : echo_)
      if (k == key) {
        v = std::move(value);
        return;
      }
    echo_.emplace_back(key, std::move(value));
  }

  const Config& cfg_;
  bool quick_;
  std::vector<std::pair<std::string, std::string>> echo_;
};

struct RunInfo {
  std::vector<std::pair<std::string, std::string>> echo;
  int workers = 1;
  bool timestamp = false;
};

inline RunInfo finish(Resolver& r) { return {r.echo(), r.workers(), r.timestamp()}; }

struct FigureOutput {
  ResultTable table;
  /// Auxiliary tables written next to the main one as <stem>_<name>.csv.
  std::vector<std::pair<std::string, ResultTable>> extras;
};

inline void stamp(ResultTable& t, const RunInfo& info) {
  t.set_meta("ptkr_version", PTKR_VERSION);
  for (const auto& [k, v] : info.echo) t.set_meta("config." + k, v);
  if (info.timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    t.set_meta("wall_clock", buf);
  }
}

inline SystemParams read_params(Resolver& r, double k, double lambda, double hbar, int n_full, int n_quick,
                                bool allow_auto = false) {
  const double kk = r.real("K", k);
  const double lam = r.real("lambda", lambda);
  const double hb = r.real("hbar", hbar);
  const int n = r.integer("N", n_full, n_quick);
  const int os = r.integer("oversample", 2);
  const Boundary b = parse_boundary(r.text("boundary", "periodic"));
  if (n == 0 && !allow_auto) throw ConfigError("this experiment needs an explicit basis size N");
  // N = 0 requests automatic sizing; validate the rest with a placeholder lattice
  return {kk, lam, hb, n == 0 ? SystemParams::min_basis_size : n, os, b};
}

// ---------------------------------------------------------------------------
// PT-breaking order parameter against lambda

struct Fig1Settings {
  SystemParams base{5.0, 0.0, 1.0};
  std::vector<double> hbars;
  std::vector<double> lambdas;
  bool bisect = true;
  double bisect_lower = 0.02, bisect_upper = 0.3, bisect_tolerance = 1e-3, threshold = 1e-6;
  RunInfo info;
};

inline Fig1Settings fig1_settings(const Config& cfg) {
  Resolver r(cfg, "spectrum-sweep");
  Fig1Settings s;
  s.base = read_params(r, 5.0, 0.0, 1.0, 2048, 512);
  s.hbars = r.list("hbars", {1.0, 1.5});
  const double lo = r.real("lambda_min", 0.0);
  const double hi = r.real("lambda_max", 0.3);
  const double step = r.real("lambda_step", 0.01, 0.05);
  s.lambdas = r.list("lambdas", arithmetic_grid(lo, hi, step));
  s.bisect = r.flag("bisect", true, false);
  s.bisect_lower = r.real("bisect_lower", 0.02);
  s.bisect_upper = r.real("bisect_upper", 0.3);
  s.bisect_tolerance = r.real("bisect_tolerance", 1e-3);
  s.threshold = r.real("threshold", 1e-6);
  s.info = finish(r);
  return s;
}

inline FigureOutput run_fig1(const Fig1Settings& s) {
  ResultTable t({{"hbar", ColumnType::real},
                 {"lambda", ColumnType::real},
                 {"mean_abs_imag", ColumnType::real},
                 {"max_eps_i", ColumnType::real}});
  stamp(t, s.info);
  for (double hb : s.hbars) {
    const SystemParams p = s.base.with_hbar(hb);
    for (const auto& row : lambda_sweep(p, s.lambdas, s.info.workers))
      t.add_row({hb, row.lambda, row.mean_abs_imag, row.max_eps_i});
    if (s.bisect) {
      const std::string key = "lambda_c.hbar_" + format_real(hb);
      try {
        const auto c = find_critical_lambda(p, s.bisect_lower, s.bisect_upper, s.bisect_tolerance, s.threshold);
        t.set_meta(key, format_real(c.lambda_c));
        t.set_meta(key + ".bracket", format_real(c.lower) + "," + format_real(c.upper));
      } catch (const InvalidArgument& e) {
        t.set_meta(key, std::string("unavailable: ") + e.what());
      }
    }
  }
  return {std::move(t), {}};
}

// ---------------------------------------------------------------------------
// Momentum current against time

struct Fig2Settings {
  SystemParams base{5.0, 0.0, 1.0};
  bool auto_size = true;
  std::vector<double> lambdas;
  EvolveConfig evolve;
  double plateau_slope = 0.02;
  int plateau_length = 30;
  RunInfo info;
};

/// Lattice for `kicks` kicks of a current growing at most max(K, 2 pi round(K / 2 pi)) per kick.
inline int auto_basis_size(double kick, int kicks, double hbar) {
  const double rate = std::max(kick, acceleration_rate_prediction(kick));
  return std::max(2048, lattice_size_for(rate * kicks, hbar, 0.8));
}

inline EvolveConfig read_evolve(Resolver& r, int kicks_full, int kicks_quick, StepOrder order) {
  EvolveConfig e;
  e.n_kicks = r.integer("kicks", kicks_full, kicks_quick);
  e.record_every = r.integer("record_every", 1);
  e.renormalize = r.flag("renormalize", true);
  e.order = parse_step_order(r.text("order", to_string(order)));
  e.edge_fraction = r.real("edge_fraction", 0.02);
  e.edge_tolerance = r.real("edge_tolerance", 1e-8);
  e.validate();
  return e;
}

inline Fig2Settings fig2_settings(const Config& cfg) {
  Resolver r(cfg, "evolve");
  Fig2Settings s;
  s.auto_size = cfg.get_int("N", 0) == 0;
  s.base = read_params(r, 5.0, 0.0, 1.0, 0, 0, true);
  s.lambdas = r.list("lambdas", {0.0, 0.06, 0.09, 0.2, 0.6, 0.9});
  if (!std::is_sorted(s.lambdas.begin(), s.lambdas.end())) throw ConfigError("lambdas must be ascending");
  s.evolve = read_evolve(r, 600, 150, StepOrder::free_then_kick);
  s.plateau_slope = r.real("plateau_slope", 0.02);
  s.plateau_length = r.integer("plateau_length", 30);
  if (s.auto_size)
    s.base = s.base.with_basis_size(auto_basis_size(s.base.kick_strength(), s.evolve.n_kicks, s.base.hbar()));
  s.info = finish(r);
  return s;
}

struct LambdaRun {
  double lambda = 0;
  CurrentSeries series;
};

inline std::vector<LambdaRun> run_lambda_series(const SystemParams& base, const std::vector<double>& lambdas,
                                                const EvolveConfig& ec, int workers) {
  return parallel_map(lambdas.size(), workers, [&](std::size_t i) {
    const SystemParams p = base.with_gain(lambdas[i]);
    return LambdaRun{lambdas[i], evolve(make_ground_state(p), p, ec)};
  });
}

inline FigureOutput run_fig2(const Fig2Settings& s) {
  ResultTable t({{"lambda", ColumnType::real},
                 {"t", ColumnType::integer},
                 {"mean_p", ColumnType::real},
                 {"log_norm", ColumnType::real},
                 {"participation", ColumnType::real}});
  stamp(t, s.info);
  t.set_meta("basis_size", std::to_string(s.base.basis_size()));
  ResultTable summary({{"lambda", ColumnType::real},
                       {"slope", ColumnType::real},
                       {"final_mean_p", ColumnType::real},
                       {"final_log_norm", ColumnType::real},
                       {"plateaus", ColumnType::integer},
                       {"truncated", ColumnType::integer}});
  ResultTable plateaus({{"lambda", ColumnType::real},
                        {"t_begin", ColumnType::integer},
                        {"t_end", ColumnType::integer},
                        {"value", ColumnType::real}});
  stamp(summary, s.info);
  stamp(plateaus, s.info);

  for (const auto& run : run_lambda_series(s.base, s.lambdas, s.evolve, s.info.workers)) {
    for (const auto& r : run.series.records)
      t.add_row({run.lambda, static_cast<std::int64_t>(r.t), r.mean_p, r.log_norm, r.participation});
    const std::string key = "truncation.lambda_" + format_real(run.lambda);
    t.set_meta(key, run.series.truncation_warning ? "kick " + std::to_string(run.series.first_truncation_kick)
                                                   : "none");
    double slope = std::nan("");
    if (!run.series.truncation_warning && run.series.final_kick() / 2 >= 50)
      slope = measure_acceleration_rate(run.series);
    const auto pl = find_plateaus(run.series, s.plateau_slope, s.plateau_length);
    for (const auto& p : pl) plateaus.add_row({run.lambda, p.t_begin, p.t_end, p.value});
    const auto& last = run.series.records.back();
    summary.add_row({run.lambda, slope, last.mean_p, last.log_norm, static_cast<std::int64_t>(pl.size()),
                     static_cast<std::int64_t>(run.series.truncation_warning ? 1 : 0)});
  }
  return {std::move(t), {{"summary", std::move(summary)}, {"plateaus", std::move(plateaus)}}};
}

// ---------------------------------------------------------------------------
// Complex spectrum at one gain strength, tied to the staircase

struct Fig3Settings {
  SystemParams params{5.0, 0.09, 1.0};
  PlatformOptions platforms;
  EvolveConfig evolve;
  double plateau_slope = 0.02;
  int plateau_length = 30;
  RunInfo info;
};

inline Fig3Settings fig3_settings(const Config& cfg) {
  Resolver r(cfg, "spectrum-sweep");
  Fig3Settings s;
  s.params = read_params(r, 5.0, 0.09, 1.0, 2048, 256);
  s.platforms.fraction = r.real("fraction", 0.5);
  s.platforms.gap_in_hbar = r.real("gap", 2.0);
  s.platforms.growth_floor = r.real("growth_floor", 1e-10);
  s.evolve = read_evolve(r, 1000, 300, StepOrder::free_then_kick);
  s.plateau_slope = r.real("plateau_slope", 0.02);
  s.plateau_length = r.integer("plateau_length", 30);
  s.info = finish(r);
  return s;
}

/// Eigenpairs sorted by decreasing eps_i (ties keep solver order).
inline std::vector<std::size_t> order_by_growth(const QuasiSpectrum& spec) {
  std::vector<std::size_t> idx(spec.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return spec.levels[a].eps_i > spec.levels[b].eps_i; });
  return idx;
}

inline FigureOutput run_fig3(const Fig3Settings& s) {
  const QuasiSpectrum spec = eigendecompose(build_floquet_matrix(s.params));
  ResultTable t({{"eps_r", ColumnType::real},
                 {"eps_i", ColumnType::real},
                 {"mean_p", ColumnType::real},
                 {"ipr", ColumnType::real},
                 {"residual", ColumnType::real}});
  stamp(t, s.info);
  for (std::size_t j : order_by_growth(spec)) {
    const auto& q = spec.levels[j];
    t.add_row({q.eps_r, q.eps_i, q.mean_p, q.ipr, q.residual});
  }
  t.set_meta("mean_abs_imag", format_real(mean_abs_imag(spec)));

  const PlatformSet ps = dominant_platforms(spec, s.platforms);
  t.set_meta("pt_unbroken", ps.pt_unbroken ? "true" : "false");

  MomentumState init = make_ground_state(s.params);
  const CurrentSeries series = evolve(init, s.params, s.evolve);
  const auto plateaus = find_plateaus(series, s.plateau_slope, s.plateau_length);

  ResultTable pt({{"rank", ColumnType::integer},
                  {"center", ColumnType::real},
                  {"max_eps_i", ColumnType::real},
                  {"members", ColumnType::integer},
                  {"nearest_plateau", ColumnType::real},
                  {"distance", ColumnType::real}});
  stamp(pt, s.info);
  for (std::size_t i = 0; i < ps.platforms.size(); ++i) {
    const auto& pl = ps.platforms[i];
    double best = std::nan(""), dist = std::nan("");
    for (const auto& p : plateaus)
      if (std::isnan(dist) || std::abs(p.value - pl.center) < dist) {
        best = p.value;
        dist = std::abs(p.value - pl.center);
      }
    pt.add_row({static_cast<std::int64_t>(i), pl.center, pl.max_eps_i, static_cast<std::int64_t>(pl.members), best,
                dist});
  }
  ResultTable plat({{"t_begin", ColumnType::integer}, {"t_end", ColumnType::integer}, {"value", ColumnType::real}});
  stamp(plat, s.info);
  plat.set_meta("truncation", series.truncation_warning ? "kick " + std::to_string(series.first_truncation_kick)
                                                        : "none");
  for (const auto& p : plateaus) plat.add_row({p.t_begin, p.t_end, p.value});
  return {std::move(t), {{"platforms", std::move(pt)}, {"plateaus", std::move(plat)}}};
}

// ---------------------------------------------------------------------------
// Acceleration rate against kick strength

struct Fig4Settings {
  double lambda = 5.0, hbar = 0.1;
  int basis_size = 0;  // 0: size each K automatically
  int oversample = 2;
  Boundary boundary = Boundary::periodic;
  std::vector<double> ks;
  EvolveConfig evolve;
  int window = 150;
  int classical_kicks = 200;
  double capture = pi;
  RunInfo info;
};

inline Fig4Settings fig4_settings(const Config& cfg) {
  Resolver r(cfg, "k-sweep");
  Fig4Settings s;
  s.lambda = r.real("lambda", 5.0);
  s.hbar = r.real("hbar", 0.1);
  s.basis_size = r.integer("N", 0);
  s.oversample = r.integer("oversample", 2);
  s.boundary = parse_boundary(r.text("boundary", "periodic"));
  const double lo = r.real("k_min", pi + 0.2);
  const double hi = r.real("k_max", 8 * pi);
  const double step = r.real("k_step", 0.2, 1.0);
  s.ks = r.list("ks", arithmetic_grid(lo, hi, step));
  if (!std::is_sorted(s.ks.begin(), s.ks.end())) throw ConfigError("ks must be ascending");
  s.evolve = read_evolve(r, 300, 100, StepOrder::free_then_kick);
  s.window = r.integer("window", 150, 50);
  s.classical_kicks = r.integer("classical_kicks", 200);
  s.capture = r.real("capture", pi);
  s.info = finish(r);
  if (s.window > s.evolve.n_kicks) throw ConfigError("window longer than the run");
  return s;
}

/// Lattice holding the final packet center plus six packet widths inside the inner 80%.
inline int fig4_basis_size(double kick, double lambda, double hbar, int kicks) {
  const double rate = std::max(kick, acceleration_rate_prediction(kick));
  const double sigma = std::sqrt(hbar * lambda * kick / 2.0);
  return fft_friendly_size(static_cast<long>(std::ceil(2.0 * (rate * kicks + 6.0 * sigma) / (0.8 * hbar))) + 2);
}

struct KRow {
  double k = 0, d_quantum = 0, d_classical = 0, d_predicted = 0;
  int basis_size = 0;
  std::string status;
};

inline KRow fig4_point(const Fig4Settings& s, double k) {
  KRow row;
  row.k = k;
  row.d_predicted = acceleration_rate_prediction(k);
  row.d_classical = classical_D(k, s.classical_kicks, s.capture);
  row.basis_size = s.basis_size > 0 ? s.basis_size : fig4_basis_size(k, s.lambda, s.hbar, s.evolve.n_kicks);
  try {
    const SystemParams p(k, s.lambda, s.hbar, row.basis_size, s.oversample, s.boundary);
    const CurrentSeries series = evolve(make_ground_state(p), p, s.evolve);
    row.d_quantum = measure_acceleration_rate(series, s.window);
    row.status = "ok";
  } catch (const Error& e) {
    row.d_quantum = std::nan("");
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), ',', ';');
    row.status = msg;
  }
  return row;
}

inline FigureOutput run_fig4(const Fig4Settings& s) {
  ResultTable t({{"K", ColumnType::real},
                 {"D_quantum", ColumnType::real},
                 {"D_classical", ColumnType::real},
                 {"D_predicted", ColumnType::real},
                 {"N", ColumnType::integer},
                 {"status", ColumnType::text}});
  stamp(t, s.info);
  const auto rows = parallel_map(s.ks.size(), s.info.workers, [&](std::size_t i) { return fig4_point(s, s.ks[i]); });
  for (const auto& r : rows)
    t.add_row({r.k, r.d_quantum, r.d_classical, r.d_predicted, static_cast<std::int64_t>(r.basis_size), r.status});
  return {std::move(t), {}};
}

// ---------------------------------------------------------------------------
// Single-run subcommands

struct SpectrumSettings {
  SystemParams params{5.0, 0.09, 1.0};
  bool vectors = true;
  RunInfo info;
};

inline SpectrumSettings spectrum_settings(const Config& cfg) {
  Resolver r(cfg, "spectrum");
  SpectrumSettings s;
  s.params = read_params(r, 5.0, 0.09, 1.0, 1024, 256);
  s.vectors = r.flag("vectors", true);
  s.info = finish(r);
  return s;
}

inline FigureOutput run_spectrum(const SpectrumSettings& s) {
  const FloquetMatrix fm = build_floquet_matrix(s.params);
  const QuasiSpectrum spec = s.vectors ? eigendecompose(fm) : quasi_energies(fm);
  ResultTable t({{"eps_r", ColumnType::real},
                 {"eps_i", ColumnType::real},
                 {"mean_p", ColumnType::real},
                 {"ipr", ColumnType::real},
                 {"residual", ColumnType::real}});
  stamp(t, s.info);
  t.set_meta("mean_abs_imag", format_real(mean_abs_imag(spec)));
  t.set_meta("max_eps_i", format_real(max_eps_i(spec.levels)));
  for (std::size_t j : order_by_growth(spec)) {
    const auto& q = spec.levels[j];
    t.add_row({q.eps_r, q.eps_i, q.mean_p, q.ipr, q.residual});
  }
  return {std::move(t), {}};
}

struct EvolveSettings {
  SystemParams params{5.0, 0.0, 1.0};
  EvolveConfig evolve;
  RunInfo info;
};

inline EvolveSettings evolve_settings(const Config& cfg) {
  Resolver r(cfg, "evolve");
  EvolveSettings s;
  s.params = read_params(r, 5.0, 0.0, 1.0, 2048, 512);
  s.evolve = read_evolve(r, 1000, 100, StepOrder::free_then_kick);
  s.info = finish(r);
  return s;
}

inline FigureOutput run_evolve(const EvolveSettings& s) {
  ResultTable t({{"t", ColumnType::integer},
                 {"mean_p", ColumnType::real},
                 {"log_norm", ColumnType::real},
                 {"participation", ColumnType::real},
                 {"mean_p2", ColumnType::real}});
  stamp(t, s.info);
  const CurrentSeries series = evolve(make_ground_state(s.params), s.params, s.evolve);
  for (const auto& r : series.records) t.add_row({r.t, r.mean_p, r.log_norm, r.participation, r.mean_p2});
  t.set_meta("truncation", series.truncation_warning ? "kick " + std::to_string(series.first_truncation_kick)
                                                     : "none");
  if (!series.truncation_warning && series.final_kick() / 2 >= 50) {
    t.set_meta("D", format_real(measure_acceleration_rate(series)));
    t.set_meta("second_moment_ratio", format_real(second_moment_ratio(series)));
  }
  return {std::move(t), {}};
}

struct ClassicalSettings {
  std::vector<double> ks;
  int kicks = 200;
  double capture = pi;
  RunInfo info;
};

inline ClassicalSettings classical_settings(const Config& cfg) {
  Resolver r(cfg, "classical-sweep");
  ClassicalSettings s;
  const double lo = r.real("k_min", pi + 0.05);
  const double hi = r.real("k_max", 8 * pi);
  const double step = r.real("k_step", 0.1, 0.5);
  s.ks = r.list("ks", arithmetic_grid(lo, hi, step));
  s.kicks = r.integer("kicks", 200, 100);
  s.capture = r.real("capture", pi);
  s.info = finish(r);
  return s;
}

inline FigureOutput run_classical(const ClassicalSettings& s) {
  ResultTable t({{"K", ColumnType::real}, {"D_classical", ColumnType::real}, {"D_predicted", ColumnType::real}});
  stamp(t, s.info);
  for (double k : s.ks) t.add_row({k, classical_D(k, s.kicks, s.capture), acceleration_rate_prediction(k)});
  return {std::move(t), {}};
}

struct OracleSettings {
  SystemParams params{5.0, 5.0, 0.1};
  bool auto_size = true;
  EvolveConfig evolve;
  int transient = 5;
  double capture = pi;
  RunInfo info;
};

inline OracleSettings oracle_settings(const Config& cfg) {
  Resolver r(cfg, "oracle-compare");
  OracleSettings s;
  s.auto_size = cfg.get_int("N", 0) == 0;
  s.params = read_params(r, 5.0, 5.0, 0.1, 0, 0, true);
  s.evolve = read_evolve(r, 200, 50, StepOrder::gain_last);
  s.transient = r.integer("transient", 5);
  s.capture = r.real("capture", pi);
  const auto& p = s.params;
  if (s.auto_size)
    s.params = p.with_basis_size(
        fig4_basis_size(p.kick_strength(), p.gain_strength(), p.hbar(), s.evolve.n_kicks));
  s.info = finish(r);
  return s;
}

inline FigureOutput run_oracle_compare(const OracleSettings& s) {
  const OracleTrajectory orc = oracle_trajectory(s.params, s.evolve.n_kicks, s.capture);
  EvolveConfig ec = s.evolve;
  ec.record_every = 1;
  const CurrentSeries series = evolve(make_ground_state(s.params), s.params, ec);
  ResultTable t({{"t", ColumnType::integer},
                 {"p_oracle", ColumnType::real},
                 {"p_quantum", ColumnType::real},
                 {"increment_oracle", ColumnType::real},
                 {"increment_quantum", ColumnType::real},
                 {"dtheta", ColumnType::real},
                 {"dp", ColumnType::real}});
  stamp(t, s.info);
  t.set_meta("basis_size", std::to_string(s.params.basis_size()));
  t.set_meta("D_oracle", format_real(orc.D));
  t.set_meta("truncation", series.truncation_warning ? "kick " + std::to_string(series.first_truncation_kick)
                                                     : "none");
  double worst = 0;
  for (std::size_t j = 0; j < orc.packets.size(); ++j) {
    const auto& g = orc.packets[j];
    const double inc_o = j == 0 ? std::nan("") : g.p_bar - orc.packets[j - 1].p_bar;
    const double inc_q = j == 0 ? std::nan("") : series.records[j].mean_p - series.records[j - 1].mean_p;
    if (static_cast<int>(j) > s.transient) worst = std::max(worst, std::abs(inc_q - inc_o) / std::abs(inc_o));
    t.add_row({static_cast<std::int64_t>(j), g.p_bar, series.records[j].mean_p, inc_o, inc_q, g.dtheta, g.dp});
  }
  t.set_meta("max_relative_increment_deviation", format_real(worst));
  return {std::move(t), {}};
}

}  // namespace ptkr::experiments

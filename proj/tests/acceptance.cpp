// Acceptance checks. Run with a criterion name, or with no argument to run all.
// Prints one PASS/FAIL line per criterion; exit status is nonzero if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ptkr/experiments/figures.hpp"
#include "ptkr/ptkr.hpp"

using namespace ptkr;
using namespace ptkr::experiments;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double participation(const QuasiEnergy& q) { return 1.0 / q.ipr; }

Verdict unitarity() {
  Verdict v;
  Stopwatch sw;
  const SystemParams p(5.0, 0.0, 1.0, 1024);
  EvolveConfig ec;
  ec.n_kicks = 1000;
  const CurrentSeries s = evolve(make_ground_state(p), p, ec);
  double worst_norm = 0, worst_p = 0;
  for (const auto& r : s.records) {
    worst_norm = std::max(worst_norm, std::abs(std::exp(r.log_norm) - 1.0));
    worst_p = std::max(worst_p, std::abs(r.mean_p));
  }
  const double t = sw.seconds();
  v.require(s.records.size() == 1001, "1001 records");
  v.require(worst_norm <= 1e-10, fmt("max |exp(log_norm)-1| = %.3g", worst_norm));
  v.require(worst_p <= 1e-10, fmt("max |<p>| = %.3g", worst_p));
  v.require(t < 10.0, fmt("runtime %.2f s", t));
  return v;
}

Verdict equivalence() {
  Verdict v;
  Stopwatch sw;
  const SystemParams p(5.0, 0.09, 1.0, 256);
  const FloquetMatrix fm = build_floquet_matrix(p);
  const MomentumLattice lat(p);
  const Eigen::MatrixXcd u = fm.entries * std::exp(fm.log_scale);
  std::mt19937_64 rng(20240);
  std::normal_distribution<double> g;
  double worst = 0;
  for (int trial = 0; trial < 5; ++trial) {
    ComplexVector psi(256);
    for (auto& z : psi) z = {g(rng), g(rng)};
    psi.normalize();
    MomentumState s(lat, psi);
    FloquetPropagator prop(p);
    ComplexVector dense = psi;
    for (int k = 0; k < 10; ++k) {
      prop.step(s, false);
      dense = u * dense;
    }
    const ComplexVector split = s.amplitudes * std::exp(s.log_norm);
    worst = std::max(worst, (split - dense).cwiseAbs().maxCoeff());
  }
  const double t = sw.seconds();
  v.require(worst <= 1e-7, fmt("max abs error %.3g", worst));
  v.require(t < 30.0, fmt("runtime %.2f s", t));
  return v;
}

struct SpectrumCheck {
  double max_residual = 0, trace_rel = 0, max_circle = 0;
};

SpectrumCheck check_spectrum(const SystemParams& p) {
  const FloquetMatrix fm = build_floquet_matrix(p);
  const EigenOptions loose{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const QuasiSpectrum spec = eigendecompose(fm, loose);
  SpectrumCheck c;
  cplx sum = 0;
  for (const auto& q : spec.levels) {
    c.max_residual = std::max(c.max_residual, q.residual);
    c.max_circle = std::max(c.max_circle, std::abs(std::abs(q.eigenvalue) - 1.0));
    sum += q.eigenvalue;
  }
  const cplx tr = fm.entries.trace();
  c.trace_rel = std::abs(sum - tr) / std::abs(tr);
  return c;
}

Verdict eigensolver() {
  Verdict v;
  Stopwatch sw;
  const SpectrumCheck broken = check_spectrum(SystemParams(5.0, 0.09, 1.0, 512));
  const SpectrumCheck unitary = check_spectrum(SystemParams(5.0, 0.0, 1.0, 512));
  const double t = sw.seconds();
  v.require(broken.max_residual <= 1e-8 && unitary.max_residual <= 1e-8,
            fmt("max residual %.3g (lambda=0.09), %.3g (lambda=0)", broken.max_residual, unitary.max_residual));
  v.require(broken.trace_rel <= 1e-8 && unitary.trace_rel <= 1e-8,
            fmt("trace mismatch %.3g, %.3g relative", broken.trace_rel, unitary.trace_rel));
  v.require(unitary.max_circle <= 1e-10, fmt("lambda=0 max ||mu|-1| = %.3g", unitary.max_circle));
  v.require(t < 60.0, fmt("runtime %.1f s", t));
  return v;
}

Verdict pt_transition() {
  Verdict v;
  const SystemParams base(5.0, 0.0, 1.0, 2048);
  const double low = mean_abs_imag(quasi_energies(build_floquet_matrix(base.with_gain(0.02))));
  const double high = mean_abs_imag(quasi_energies(build_floquet_matrix(base.with_gain(0.3))));
  v.require(low <= 1e-8, fmt("mean|eps_i|(0.02) = %.3g", low));
  v.require(high >= 1e-4, fmt("mean|eps_i|(0.3) = %.3g", high));
  try {
    const CriticalLambda c = find_critical_lambda(base, 0.02, 0.3, 1e-3, 1e-6);
    v.require(c.lambda_c > 0.06 && c.lambda_c < 0.09,
              fmt("lambda_c = %.4f in (0.06, 0.09)", c.lambda_c) + fmt(" bracket width %.2g", c.upper - c.lower));
  } catch (const Error& e) {
    v.require(false, std::string("bisection failed: ") + e.what());
  }
  return v;
}

// Two fastest-growing levels, by decreasing eps_i.
std::vector<QuasiEnergy> top_two(const QuasiSpectrum& spec) {
  std::vector<QuasiEnergy> lv = spec.levels;
  std::sort(lv.begin(), lv.end(), [](const auto& a, const auto& b) { return a.eps_i > b.eps_i; });
  lv.resize(2);
  return lv;
}

Verdict fig3_values() {
  Verdict v;
  const SystemParams p(5.0, 0.09, 1.0, 2048);
  const auto big = top_two(eigendecompose(build_floquet_matrix(p)));
  const auto small = top_two(eigendecompose(build_floquet_matrix(p.with_basis_size(1024))));
  const double want[2] = {0.008, 0.00393};
  for (int i = 0; i < 2; ++i) {
    v.require(std::abs(big[i].eps_i - want[i]) <= 0.2 * want[i],
              fmt("eps_i[%.0f] = %.5g", i, big[i].eps_i) + fmt(" vs %.5g", want[i]));
    v.require(participation(big[i]) < 0.05 * 2048, fmt("participation[%.0f] = %.1f", i, participation(big[i])));
    const double de = std::abs(big[i].eps_i - small[i].eps_i) / std::abs(big[i].eps_i);
    const double dp = std::abs(big[i].mean_p - small[i].mean_p) / std::max(std::abs(big[i].mean_p), 1.0);
    v.require(de <= 0.01 && dp <= 0.01, fmt("N 1024->2048: eps_i shift %.3g, <p> shift %.3g", de, dp));
  }
  return v;
}

Verdict staircase() {
  Verdict v;
  const SystemParams p(5.0, 0.09, 1.0, 2048);
  const PlatformSet ps = dominant_platforms(eigendecompose(build_floquet_matrix(p)));
  // the figure-2 run at this gain, on its own untruncated lattice
  Config c;
  c.set("lambdas", "0.09");
  const Fig2Settings f2 = fig2_settings(c);
  const SystemParams q = f2.base.with_gain(0.09);
  const CurrentSeries series = evolve(make_ground_state(q), q, f2.evolve);
  const auto plateaus = find_plateaus(series, 0.02, 30);
  std::vector<double> a, b;
  for (const auto& pl : plateaus) a.push_back(pl.value);
  for (const auto& pl : ps.platforms) b.push_back(pl.center);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::string la, lb;
  for (double x : a) la += fmt(" %.2f", x);
  for (double x : b) lb += fmt(" %.2f", x);
  v.require(!series.truncation_warning, "no truncation");
  v.require(!a.empty() && a.size() == b.size(), "plateaus {" + la + " } vs platforms {" + lb + " }");
  if (!a.empty() && a.size() == b.size()) {
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    v.require(worst <= 0.5, fmt("max distance %.3g", worst));
  }
  return v;
}

Verdict lambda_independence() {
  Verdict v;
  Config c;
  c.set("lambdas", "0.6,0.9");
  const FigureOutput out = run_fig2(fig2_settings(c));
  const auto it = std::find_if(out.extras.begin(), out.extras.end(), [](const auto& e) { return e.first == "summary"; });
  if (it == out.extras.end()) throw Error("fig2 output has no summary table");
  const ResultTable& sum = it->second;
  const auto slope = sum.real_column("slope");
  const double rel = std::abs(slope[0] - slope[1]) / (0.5 * std::abs(slope[0] + slope[1]));
  v.require(std::isfinite(rel) && rel <= 0.05, fmt("slopes %.4f, %.4f", slope[0], slope[1]) + fmt(" differ by %.2f%%", 100 * rel));
  return v;
}

Verdict fig4() {
  Verdict v;
  Config c;
  const Fig4Settings s = fig4_settings(c);
  const ResultTable t = run_fig4(s).table;
  const auto k = t.real_column("K"), dq = t.real_column("D_quantum"), dc = t.real_column("D_classical"),
             dp = t.real_column("D_predicted");
  int checked = 0, bad = 0;
  double worst_k = 0, worst_rel = 0, worst_classical = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    worst_classical = std::max(worst_classical, std::abs(dc[i] - dp[i]));
    const double odd = 2.0 * std::round((k[i] / pi - 1.0) / 2.0) + 1.0;
    const double nearest = std::abs(k[i] - odd * pi);
    if (nearest < 0.3) continue;
    ++checked;
    const double rel = std::abs(dq[i] - dp[i]) / dp[i];
    if (!(rel <= 0.1)) ++bad;
    if (!(rel <= worst_rel)) {
      worst_rel = rel;
      worst_k = k[i];
    }
  }
  v.require(bad == 0, fmt("%.0f grid points checked", checked) + fmt(", %.0f outside 10%%", bad) +
                          fmt(" (worst K=%.2f at %.1f%%)", worst_k, 100 * worst_rel));
  v.require(worst_classical <= 1e-9, fmt("classical vs prediction max %.3g", worst_classical));

  Config r;
  r.set("ks", format_real(two_pi) + "," + format_real(4 * pi) + "," + format_real(6 * pi));
  const ResultTable res = run_fig4(fig4_settings(r)).table;
  const auto rq = res.real_column("D_quantum");
  for (int j = 0; j < 3; ++j) {
    const double want = two_pi * (j + 1);
    v.require(std::abs(rq[j] - want) <= 0.05 * want, fmt("D(%.0fpi) = %.4f", 2 * (j + 1), rq[j]));
  }
  return v;
}

Verdict oracle() {
  Verdict v;
  Config c;
  const OracleSettings s = oracle_settings(c);
  const FigureOutput out = run_oracle_compare(s);
  const double worst = parse_real(*out.table.meta("max_relative_increment_deviation"));
  const double d = parse_real(*out.table.meta("D_oracle"));
  v.require(d == two_pi, fmt("oracle increment %.17g", d));
  v.require(worst <= 0.05, fmt("max relative increment deviation after kick 5: %.3g", worst));
  v.require(*out.table.meta("truncation") == "none", "no truncation");

  const SystemParams& p = s.params;
  const OracleTrajectory tr = oracle_trajectory(p, s.evolve.n_kicks);
  const double hb = p.hbar(), lk = p.gain_strength() * p.kick_strength();
  const double wt = std::sqrt(hb / (2 * lk)), wp = std::sqrt(hb * lk / 2);
  double worst_u = 0;
  bool widths = true;
  for (std::size_t j = 1; j < tr.packets.size(); ++j) {
    worst_u = std::max(worst_u, std::abs(tr.packets[j].uncertainty() - hb / 2));
    widths = widths && tr.packets[j].dtheta == wt && tr.packets[j].dp == wp;
  }
  // exact up to the rounding of two square roots and a product
  const double ulps = 4 * std::numeric_limits<double>::epsilon() * hb / 2;
  v.require(worst_u <= ulps, fmt("max |dtheta dp - hbar/2| = %.3g", worst_u));
  v.require(widths, "widths equal sqrt(hbar/2 lambda K), sqrt(hbar lambda K/2)");
  return v;
}

Verdict determinism() {
  Verdict v;
  using Runner = std::function<FigureOutput(const Config&)>;
  const std::map<std::string, Runner> figures = {
      {"fig1", [](const Config& c) { return run_fig1(fig1_settings(c)); }},
      {"fig2", [](const Config& c) { return run_fig2(fig2_settings(c)); }},
      {"fig3", [](const Config& c) { return run_fig3(fig3_settings(c)); }},
      {"fig4", [](const Config& c) { return run_fig4(fig4_settings(c)); }},
  };
  const auto render = [](const FigureOutput& f) {
    std::string s = f.table.to_csv();
    for (const auto& [name, t] : f.extras) s += name + "\n" + t.to_csv();
    return s;
  };
  for (const auto& [name, run] : figures) {
    std::string first;
    bool same = true;
    for (const char* workers : {"1", "1", "8", "8"}) {
      Config c;
      c.set("quick", "true");
      c.set("workers", workers);
      const std::string csv = render(run(c));
      if (first.empty()) first = csv;
      same = same && csv == first;
    }
    v.require(same, name + " bit-identical (repeat, workers 1 vs 8)");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"unitarity", unitarity},
      {"equivalence", equivalence},
      {"eigensolver", eigensolver},
      {"pt_transition", pt_transition},
      {"fig3_values", fig3_values},
      {"staircase", staircase},
      {"lambda_independence", lambda_independence},
      {"fig4_staircase", fig4},
      {"oracle", oracle},
      {"determinism", determinism},
  };
  ::unsetenv("PTKR_THREADS");
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && only != name) continue;
    ++ran;
    Verdict v;
    Stopwatch sw;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), sw.seconds(), v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}

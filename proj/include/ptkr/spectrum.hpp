#pragma once

#include <complex>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ptkr/core.hpp"
#include "ptkr/dynamics.hpp"
#include "ptkr/parallel.hpp"

namespace ptkr {

/// Largest lattice the dense matrix path accepts (N^2 complex entries).
inline constexpr int max_dense_basis_size = 8192;

/// Truncated Floquet matrix U_{mn} = c_{m-n} exp(-i hbar n^2 / 2).
///
/// The true matrix is exp(log_scale) * entries; log_scale is nonzero only
/// when the gain exponent had to be shifted to stay finite.
struct FloquetMatrix {
  SystemParams params;
  Eigen::MatrixXcd entries;
  /// Fourier coefficients c_k of exp(-i V_K / hbar), k = -M/2 .. M/2-1 at slot k + M/2.
  ComplexVector kick_coefficients;
  double log_scale = 0.0;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(entries.rows()); }

  [[nodiscard]] cplx kick_coefficient(int k) const {
    const int m = static_cast<int>(kick_coefficients.size());
    if (k < -m / 2 || k >= m / 2) return {0.0, 0.0};
    return kick_coefficients[k + m / 2];
  }
};

/// c_k = (1/M) sum_j exp(-i V_K(theta_j) / hbar) exp(-i k theta_j) on an M-point grid.
///
/// Returns the coefficients scaled by exp(-log_offset) together with that offset.
inline std::pair<ComplexVector, double> kick_fourier_coefficients(const SystemParams& p, int grid_size) {
  const AngleGrid grid(grid_size);
  const double k = p.kick_strength(), hb = p.hbar();
  const double gain_scale = k * p.gain_strength() / hb;
  const double offset = gain_scale > gain_overflow_threshold ? gain_scale : 0.0;
  ComplexVector g(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    const double th = grid.theta(j);
    g[j] = std::polar(std::exp(gain_scale * std::sin(th) - offset), -k * std::cos(th) / hb);
  }
  ComplexVector c = angle_to_momentum(g, MomentumLattice(grid_size, hb)) / std::sqrt(two_pi);
  return {std::move(c), offset};
}

inline FloquetMatrix build_floquet_matrix(const SystemParams& p) {
  const int n = p.basis_size();
  if (n > max_dense_basis_size)
    throw SizeError("dense Floquet matrix limited to N <= " + std::to_string(max_dense_basis_size) + ", got " +
                    std::to_string(n));
  const int m = p.kick_grid_size();
  auto [c, offset] = kick_fourier_coefficients(p, m);
  const MomentumLattice lat(p);
  const ComplexVector phase = free_phases(lat);

  Eigen::MatrixXcd u(n, n);
  for (int col = 0; col < n; ++col) {
    const int nc = lat.index(col);
    for (int row = 0; row < n; ++row) {
      int k = lat.index(row) - nc;
      if (p.boundary() == Boundary::periodic) {
        // ring of N sites: kick offsets live in [-N/2, N/2)
        if (k < -n / 2) k += n;
        if (k >= n / 2) k -= n;
      }
      u(row, col) = c[k + m / 2] * phase[col];
    }
  }
  return {p, std::move(u), std::move(c), offset};
}

// ---------------------------------------------------------------------------

struct QuasiEnergy {
  cplx eigenvalue;      // of exp(-log_scale) U
  double eps_r = 0;     // -arg(mu) in (-pi, pi]
  double eps_i = 0;     // ln|mu|, per-kick growth rate of the norm
  double mean_p = 0;    // sum p_n |v_n|^2
  double ipr = 0;       // sum |v_n|^4
  double residual = 0;  // ||U v - mu v||_2 on the stored scale
};

struct QuasiSpectrum {
  MomentumLattice lattice;
  std::vector<QuasiEnergy> levels;
  Eigen::MatrixXcd eigenvectors;  // column j belongs to levels[j]; empty for eigenvalue-only runs

  [[nodiscard]] std::size_t size() const noexcept { return levels.size(); }
  [[nodiscard]] bool has_vectors() const noexcept { return eigenvectors.cols() > 0; }
};

/// Principal quasi-energy of an eigenvalue: eps = eps_r + i eps_i with mu = exp(-i eps).
inline std::pair<double, double> quasi_energy_of(cplx mu, double log_scale = 0.0) {
  double er = -std::arg(mu);
  if (er <= -pi) er += two_pi;
  return {er, std::log(std::abs(mu)) + log_scale};
}

inline double eigenstate_mean_momentum(const ComplexVector& v, const MomentumLattice& lattice) {
  if (v.size() != lattice.size()) throw SizeError("eigenvector does not match lattice");
  double w = 0, w1 = 0;
  for (int i = 0; i < lattice.size(); ++i) {
    const double prob = std::norm(v[i]);
    w += prob;
    w1 += lattice.momentum(i) * prob;
  }
  if (!(w > 0.0)) throw DegenerateStateError("zero eigenvector");
  return w1 / w;
}

inline double inverse_participation(const ComplexVector& v) {
  const double w = v.squaredNorm();
  return v.cwiseAbs2().cwiseAbs2().sum() / (w * w);
}

namespace detail {

inline void run_zgeev(Eigen::MatrixXcd& a, ComplexVector& w, Eigen::MatrixXcd* vr) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  cplx dummy{};
  const char jobvr = vr != nullptr ? 'V' : 'N';
  if (vr != nullptr) vr->resize(n, n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', jobvr, n, a.data(), n, w.data(), &dummy, 1,
                                        vr != nullptr ? vr->data() : &dummy, vr != nullptr ? n : 1);
  if (info < 0) throw Error("zgeev: illegal argument " + std::to_string(-info));
  if (info > 0)
    throw ConvergenceError("eigensolver failed to converge; eigenvalue " + std::to_string(info - 1) +
                               " and below are unconverged",
                           static_cast<long>(info - 1));
}

inline void check_trace(const Eigen::MatrixXcd& u, const ComplexVector& w, double tol) {
  const cplx tr = u.trace();
  const cplx sum = w.sum();
  const double scale = std::max(std::abs(tr), u.norm() / std::sqrt(static_cast<double>(u.rows())));
  const double rel = std::abs(sum - tr) / scale;
  if (!(rel <= tol))
    throw ValidationError("eigenvalue sum differs from the trace by " + std::to_string(rel) + " (relative)");
}

}  // namespace detail

struct EigenOptions {
  double residual_tolerance = 1e-8;
  double trace_tolerance = 1e-8;
};

/// Full eigendecomposition of the (general, non-normal) Floquet matrix.
///
/// Every eigenpair is validated against ||U v - mu v|| <= residual_tolerance.
inline QuasiSpectrum eigendecompose(const FloquetMatrix& fm, const EigenOptions& opt = {}) {
  if (!fm.entries.allFinite()) throw DomainError("Floquet matrix has non-finite entries");
  Eigen::MatrixXcd a = fm.entries;
  ComplexVector w;
  Eigen::MatrixXcd v;
  detail::run_zgeev(a, w, &v);
  detail::check_trace(fm.entries, w, opt.trace_tolerance);

  for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j).normalize();
  const Eigen::MatrixXcd r = fm.entries * v - v * w.asDiagonal();

  const MomentumLattice lat(fm.params);
  QuasiSpectrum out{lat, {}, std::move(v)};
  out.levels.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    QuasiEnergy q;
    q.eigenvalue = w[j];
    std::tie(q.eps_r, q.eps_i) = quasi_energy_of(w[j], fm.log_scale);
    const ComplexVector col = out.eigenvectors.col(j);
    q.mean_p = eigenstate_mean_momentum(col, lat);
    q.ipr = inverse_participation(col);
    q.residual = r.col(j).norm();
    if (!(q.residual <= opt.residual_tolerance))
      throw ValidationError("eigenpair " + std::to_string(j) + " has residual " + std::to_string(q.residual));
    out.levels.push_back(q);
  }
  return out;
}

/// Eigenvalues only, validated by the trace identity; residual fields are NaN.
inline QuasiSpectrum quasi_energies(const FloquetMatrix& fm, const EigenOptions& opt = {}) {
  if (!fm.entries.allFinite()) throw DomainError("Floquet matrix has non-finite entries");
  Eigen::MatrixXcd a = fm.entries;
  ComplexVector w;
  detail::run_zgeev(a, w, nullptr);
  detail::check_trace(fm.entries, w, opt.trace_tolerance);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  QuasiSpectrum out{MomentumLattice(fm.params), {}, {}};
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    QuasiEnergy q{w[j], 0, 0, nan, nan, nan};
    std::tie(q.eps_r, q.eps_i) = quasi_energy_of(w[j], fm.log_scale);
    out.levels.push_back(q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// PT-breaking order parameter

/// (1/N) sum_j |eps_i^j|.
inline double mean_abs_imag(std::span<const QuasiEnergy> levels) {
  if (levels.empty()) throw InvalidArgument("empty spectrum");
  double s = 0;
  for (const auto& q : levels) s += std::abs(q.eps_i);
  return s / static_cast<double>(levels.size());
}

inline double mean_abs_imag(const QuasiSpectrum& spec) { return mean_abs_imag(spec.levels); }

inline double max_eps_i(std::span<const QuasiEnergy> levels) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& q : levels) m = std::max(m, q.eps_i);
  return m;
}

struct SweepRow {
  double lambda = 0;
  double mean_abs_imag = 0;
  double max_eps_i = 0;
};

/// One eigenvalue computation per gain strength; rows come back in grid order.
inline std::vector<SweepRow> lambda_sweep(const SystemParams& base, std::span<const double> lambdas, int workers = 1) {
  if (lambdas.empty()) throw InvalidArgument("empty lambda grid");
  if (!std::is_sorted(lambdas.begin(), lambdas.end())) throw InvalidArgument("lambda grid must be ascending");
  return parallel_map(lambdas.size(), workers, [&](std::size_t i) {
    const auto spec = quasi_energies(build_floquet_matrix(base.with_gain(lambdas[i])));
    return SweepRow{lambdas[i], mean_abs_imag(spec), max_eps_i(spec.levels)};
  });
}

struct CriticalLambda {
  double lambda_c = 0;  // midpoint of the final bracket
  double lower = 0;
  double upper = 0;
  std::vector<SweepRow> evaluations;
};

/// Bisection for the smallest lambda with mean |eps_i| > threshold.
///
/// Requires mean|eps_i|(lower) <= threshold < mean|eps_i|(upper).
inline CriticalLambda find_critical_lambda(const SystemParams& base, double lower, double upper,
                                           double tolerance = 1e-3, double threshold = 1e-6) {
  if (!(lower < upper)) throw InvalidArgument("bisection bracket must satisfy lower < upper");
  CriticalLambda out;
  auto eval = [&](double lam) {
    const auto spec = quasi_energies(build_floquet_matrix(base.with_gain(lam)));
    const SweepRow row{lam, mean_abs_imag(spec), max_eps_i(spec.levels)};
    out.evaluations.push_back(row);
    return row.mean_abs_imag;
  };
  if (eval(lower) > threshold) throw InvalidArgument("PT symmetry already broken at the lower bracket end");
  if (!(eval(upper) > threshold)) throw InvalidArgument("PT symmetry unbroken at the upper bracket end");
  while (upper - lower > tolerance) {
    const double mid = 0.5 * (lower + upper);
    (eval(mid) > threshold ? upper : lower) = mid;
  }
  out.lower = lower;
  out.upper = upper;
  out.lambda_c = 0.5 * (lower + upper);
  return out;
}

// ---------------------------------------------------------------------------
// Staircase platforms

struct PlatformOptions {
  /// Keep levels with eps_i >= fraction * max eps_i.
  double fraction = 0.5;
  /// Single-linkage gap, in units of hbar.
  double gap_in_hbar = 2.0;
  /// eps_i at or below this counts as zero (round-off on an unbroken spectrum).
  double growth_floor = 1e-10;
};

struct Platform {
  double center = 0;  // mean of member <p>
  double max_eps_i = 0;
  std::size_t members = 0;
};

struct PlatformSet {
  std::vector<Platform> platforms;  // descending by max_eps_i
  bool pt_unbroken = false;
};

inline PlatformSet dominant_platforms(std::span<const QuasiEnergy> levels, double hbar, const PlatformOptions& opt = {}) {
  PlatformSet out;
  const double top = levels.empty() ? 0.0 : max_eps_i(levels);
  if (!(top > opt.growth_floor)) {
    out.pt_unbroken = true;
    return out;
  }
  std::vector<const QuasiEnergy*> chosen;
  for (const auto& q : levels)
    if (q.eps_i > opt.growth_floor && q.eps_i >= opt.fraction * top) chosen.push_back(&q);
  std::sort(chosen.begin(), chosen.end(), [](auto* a, auto* b) { return a->mean_p < b->mean_p; });

  const double gap = opt.gap_in_hbar * hbar;
  for (std::size_t i = 0; i < chosen.size();) {
    std::size_t j = i + 1;
    while (j < chosen.size() && chosen[j]->mean_p - chosen[j - 1]->mean_p <= gap) ++j;
    Platform pl;
    double sum = 0;
    pl.max_eps_i = -std::numeric_limits<double>::infinity();
    for (std::size_t k = i; k < j; ++k) {
      sum += chosen[k]->mean_p;
      pl.max_eps_i = std::max(pl.max_eps_i, chosen[k]->eps_i);
    }
    pl.members = j - i;
    pl.center = sum / static_cast<double>(pl.members);
    out.platforms.push_back(pl);
    i = j;
  }
  std::stable_sort(out.platforms.begin(), out.platforms.end(),
                   [](const Platform& a, const Platform& b) { return a.max_eps_i > b.max_eps_i; });
  return out;
}

inline PlatformSet dominant_platforms(const QuasiSpectrum& spec, const PlatformOptions& opt = {}) {
  if (!spec.has_vectors()) throw InvalidArgument("platform extraction needs eigenvectors");
  return dominant_platforms(spec.levels, spec.lattice.hbar(), opt);
}

}  // namespace ptkr

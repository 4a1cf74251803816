#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>

#include "ptkr/error.hpp"
#include "ptkr/fft.hpp"

namespace ptkr {

using cplx = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Boundary treatment of the truncated momentum lattice.
///
/// `periodic` closes the lattice into a ring: the kick is applied on the
/// N-point angle grid and momentum N is identified with 0. The map is then
/// exactly unitary at zero gain.  `open` applies the kick on the oversampled
/// grid and discards whatever lands outside the lattice.
enum class Boundary { periodic, open };

inline std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open"; }

inline Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw InvalidArgument("unknown boundary '" + s + "' (expected periodic|open)");
}

/// True when hbar/(4 pi) is, to round-off, p/q with q <= max_denominator.
///
/// Walks the continued-fraction convergents of hbar/(4 pi); a low-order
/// quantum resonance shows up as a convergent that reproduces the value.
inline bool is_low_order_resonance(double hbar, int max_denominator = 64) {
  const double x = hbar / (4.0 * pi);
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  double a = std::floor(x);
  double frac = x - a;
  long double h_prev = 1, h = a, k_prev = 0, k = 1;
  while (true) {
    if (std::abs(x - static_cast<double>(h / k)) <= tol) return true;
    if (frac <= 0.0) return false;
    const double r = 1.0 / frac;
    a = std::floor(r);
    frac = r - a;
    const long double h_next = a * h + h_prev;
    const long double k_next = a * k + k_prev;
    if (k_next > max_denominator) return false;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
}

/// Dimensionless parameters of the kicked rotor plus discretization sizes.
class SystemParams {
 public:
  static constexpr int min_basis_size = 64;

  SystemParams(double kick_strength, double gain_strength, double hbar_eff, int basis_size = 2048,
               int oversample = 2, Boundary boundary = Boundary::periodic)
      : kick_(kick_strength),
        gain_(gain_strength),
        hbar_(hbar_eff),
        basis_size_(basis_size),
        oversample_(oversample),
        boundary_(boundary) {
    if (!std::isfinite(kick_) || kick_ <= 0.0)
      throw InvalidArgument("kick strength K must be finite and > 0");
    if (!std::isfinite(gain_) || gain_ < 0.0)
      throw InvalidArgument("gain strength lambda must be finite and >= 0");
    if (!std::isfinite(hbar_) || hbar_ <= 0.0)
      throw InvalidArgument("effective Planck constant must be finite and > 0");
    if (basis_size_ < min_basis_size || basis_size_ % 2 != 0)
      throw InvalidArgument("basis size must be even and >= 64, got " + std::to_string(basis_size_));
    if (oversample_ < 2) throw InvalidArgument("oversample factor must be >= 2");
    if (is_low_order_resonance(hbar_))
      throw InvalidArgument("hbar/(4 pi) is a low-order rational (quantum resonance): hbar = " +
                            std::to_string(hbar_));
  }

  [[nodiscard]] double kick_strength() const noexcept { return kick_; }
  [[nodiscard]] double gain_strength() const noexcept { return gain_; }
  [[nodiscard]] double hbar() const noexcept { return hbar_; }
  [[nodiscard]] int basis_size() const noexcept { return basis_size_; }
  [[nodiscard]] int oversample() const noexcept { return oversample_; }
  [[nodiscard]] Boundary boundary() const noexcept { return boundary_; }

  /// Angle-grid size the kick is applied on.
  [[nodiscard]] int kick_grid_size() const noexcept {
    return boundary_ == Boundary::periodic ? basis_size_ : basis_size_ * oversample_;
  }

  [[nodiscard]] SystemParams with_kick(double k) const {
    return {k, gain_, hbar_, basis_size_, oversample_, boundary_};
  }
  [[nodiscard]] SystemParams with_gain(double lambda) const {
    return {kick_, lambda, hbar_, basis_size_, oversample_, boundary_};
  }
  [[nodiscard]] SystemParams with_hbar(double h) const {
    return {kick_, gain_, h, basis_size_, oversample_, boundary_};
  }
  [[nodiscard]] SystemParams with_basis_size(int n) const {
    return {kick_, gain_, hbar_, n, oversample_, boundary_};
  }
  [[nodiscard]] SystemParams with_boundary(Boundary b) const {
    return {kick_, gain_, hbar_, basis_size_, oversample_, b};
  }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  double kick_;
  double gain_;
  double hbar_;
  int basis_size_;
  int oversample_;
  Boundary boundary_;
};

/// Indices n in [-N/2, N/2) with momenta p_n = n * hbar. Storage slot i holds n = i - N/2.
class MomentumLattice {
 public:
  MomentumLattice(int size, double hbar) : size_(size), hbar_(hbar) {
    if (size < 2 || size % 2 != 0) throw SizeError("momentum lattice size must be even and >= 2");
    if (!(hbar > 0.0)) throw InvalidArgument("lattice spacing hbar must be > 0");
  }
  explicit MomentumLattice(const SystemParams& p) : MomentumLattice(p.basis_size(), p.hbar()) {}

  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] double hbar() const noexcept { return hbar_; }
  [[nodiscard]] int min_index() const noexcept { return -size_ / 2; }
  [[nodiscard]] int max_index() const noexcept { return size_ / 2 - 1; }
  [[nodiscard]] int index(int slot) const noexcept { return slot - size_ / 2; }
  [[nodiscard]] int slot(int n) const noexcept { return n + size_ / 2; }
  [[nodiscard]] bool contains(int n) const noexcept { return n >= min_index() && n <= max_index(); }
  [[nodiscard]] double momentum(int slot) const noexcept { return index(slot) * hbar_; }

  [[nodiscard]] RealVector momenta() const {
    RealVector p(size_);
    for (int i = 0; i < size_; ++i) p[i] = momentum(i);
    return p;
  }

  friend bool operator==(const MomentumLattice&, const MomentumLattice&) = default;

 private:
  int size_;
  double hbar_;
};

/// Uniform samples theta_j = -pi + 2 pi j / M on [-pi, pi).
class AngleGrid {
 public:
  explicit AngleGrid(int size) : size_(size) {
    if (size < 2 || size % 2 != 0) throw SizeError("angle grid size must be even and >= 2");
  }
  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] double spacing() const noexcept { return two_pi / size_; }
  [[nodiscard]] double theta(int j) const noexcept { return -pi + two_pi * j / size_; }

 private:
  int size_;
};

/// Momentum-space wavefunction with the norm growth kept out of the amplitudes.
///
/// The true state is exp(log_norm) * amplitudes.  After renormalization the
/// stored amplitudes have unit 2-norm.
struct MomentumState {
  MomentumLattice lattice;
  ComplexVector amplitudes;
  double log_norm = 0.0;

  MomentumState(MomentumLattice lat, ComplexVector amps, double ln = 0.0)
      : lattice(lat), amplitudes(std::move(amps)), log_norm(ln) {
    if (amplitudes.size() != lattice.size())
      throw SizeError("amplitude vector does not match lattice size");
  }

  /// Stored 2-norm.
  [[nodiscard]] double norm() const { return amplitudes.norm(); }

  /// Natural log of the true 2-norm.
  [[nodiscard]] double total_log_norm() const { return log_norm + std::log(norm()); }

  /// Rescale to unit stored norm, moving the factor into log_norm.
  void renormalize() {
    const double s = norm();
    if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateStateError("cannot renormalize a zero or non-finite state");
    amplitudes /= s;
    log_norm += std::log(s);
  }

  [[nodiscard]] cplx amplitude_at(int n) const { return amplitudes[lattice.slot(n)]; }
};

/// psi_n = delta_{n,0}.
inline MomentumState make_ground_state(const MomentumLattice& lattice) {
  ComplexVector amps = ComplexVector::Zero(lattice.size());
  amps[lattice.slot(0)] = 1.0;
  return {lattice, std::move(amps), 0.0};
}

inline MomentumState make_ground_state(const SystemParams& params) {
  return make_ground_state(MomentumLattice(params));
}

/// Canonical representative of theta modulo 2 pi in [-pi, pi).
inline double wrap_angle(double theta) {
  if (!std::isfinite(theta)) throw DomainError("wrap_angle: non-finite angle");
  double r = std::fmod(theta + pi, two_pi);
  if (r < 0.0) r += two_pi;
  r -= pi;
  // fmod can land exactly on +pi after the shift back
  if (r >= pi) r -= two_pi;
  return r;
}

/// Least-squares slope of y against x.
inline double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw SizeError("slope fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("slope fit over a single abscissa");
  return sxy / sxx;
}

/// Smallest even n >= max(min_size, 64) whose only prime factors are 2, 3, 5.
inline int fft_friendly_size(long min_size) {
  long n = std::max<long>(min_size, SystemParams::min_basis_size);
  if (n % 2 != 0) ++n;
  for (;; n += 2) {
    long m = n;
    for (long f : {2L, 3L, 5L})
      while (m % f == 0) m /= f;
    if (m == 1) {
      if (n > (1L << 30)) throw SizeError("requested lattice is too large");
      return static_cast<int>(n);
    }
  }
}

/// Transform pair between an N-site momentum lattice and an M-point angle grid (M >= N).
///
///   psi(theta_j) = sum_n psi_n e^{i n theta_j} / sqrt(2 pi)
///   psi_n        = (2 pi / M) sum_j psi(theta_j) e^{-i n theta_j} / sqrt(2 pi)
///
/// Owns its FFT plan and scratch buffer; one instance per thread.
class SpectralTransform {
 public:
  SpectralTransform(int lattice_size, int grid_size) : n_(lattice_size), plan_(grid_size) {
    if (grid_size < lattice_size)
      throw SizeError("angle grid (" + std::to_string(grid_size) + ") smaller than lattice (" +
                      std::to_string(lattice_size) + ")");
    if (lattice_size % 2 != 0 || grid_size % 2 != 0) throw SizeError("transform sizes must be even");
  }

  [[nodiscard]] int lattice_size() const noexcept { return n_; }
  [[nodiscard]] int grid_size() const noexcept { return plan_.size(); }

  /// Scratch buffer holding the angle samples between to_angle() and to_momentum().
  [[nodiscard]] std::span<cplx> samples() noexcept { return plan_.buffer(); }

  /// Momentum amplitudes -> angle samples in samples().
  void to_angle(std::span<const cplx> amplitudes) {
    auto buf = plan_.buffer();
    const int m = grid_size();
    std::fill(buf.begin(), buf.end(), cplx{0.0, 0.0});
    for (int i = 0; i < n_; ++i) {
      const int n = i - n_ / 2;
      const int k = n < 0 ? n + m : n;
      buf[k] = (n & 1) ? -amplitudes[i] : amplitudes[i];
    }
    plan_.backward();
    const double s = 1.0 / std::sqrt(two_pi);
    for (auto& v : buf) v *= s;
  }

  /// Angle samples in samples() -> momentum amplitudes, keeping only lattice modes.
  void to_momentum(std::span<cplx> amplitudes) {
    auto buf = plan_.buffer();
    const int m = grid_size();
    plan_.forward();
    const double s = std::sqrt(two_pi) / m;
    for (int i = 0; i < n_; ++i) {
      const int n = i - n_ / 2;
      const int k = n < 0 ? n + m : n;
      amplitudes[i] = ((n & 1) ? -s : s) * buf[k];
    }
  }

 private:
  int n_;
  detail::FftPlan plan_;
};

/// Samples of the state on the grid.
inline ComplexVector momentum_to_angle(const MomentumState& state, const AngleGrid& grid) {
  SpectralTransform t(state.lattice.size(), grid.size());
  t.to_angle({state.amplitudes.data(), static_cast<std::size_t>(state.amplitudes.size())});
  auto s = t.samples();
  return Eigen::Map<const ComplexVector>(s.data(), static_cast<Eigen::Index>(s.size()));
}

/// Lattice amplitudes of grid samples (band-limited projection when M > N).
inline ComplexVector angle_to_momentum(const ComplexVector& samples, const MomentumLattice& lattice) {
  SpectralTransform t(lattice.size(), static_cast<int>(samples.size()));
  auto s = t.samples();
  std::copy(samples.data(), samples.data() + samples.size(), s.begin());
  ComplexVector out(lattice.size());
  t.to_momentum({out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

}  // namespace ptkr

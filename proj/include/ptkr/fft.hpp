#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>
#include <utility>

#include "ptkr/error.hpp"

namespace ptkr::detail {

// The FFTW planner is not re-entrant; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place complex DFT of fixed length over an owned, FFTW-aligned buffer.
///
/// Plans are built with FFTW_ESTIMATE on the owned buffer, so the same
/// length always yields the same codelets and bit-identical output.
class FftPlan {
 public:
  explicit FftPlan(int size) : size_(size) {
    if (size <= 0) throw SizeError("FFT length must be positive");
    buf_ = fftw_alloc_complex(static_cast<std::size_t>(size));
    if (buf_ == nullptr) throw SizeError("FFT buffer allocation failed");
    std::lock_guard lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_1d(size, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(size, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  FftPlan(FftPlan&& other) noexcept
      : size_(std::exchange(other.size_, 0)),
        buf_(std::exchange(other.buf_, nullptr)),
        fwd_(std::exchange(other.fwd_, nullptr)),
        bwd_(std::exchange(other.bwd_, nullptr)) {}

  FftPlan& operator=(FftPlan&& other) noexcept {
    if (this != &other) {
      release();
      size_ = std::exchange(other.size_, 0);
      buf_ = std::exchange(other.buf_, nullptr);
      fwd_ = std::exchange(other.fwd_, nullptr);
      bwd_ = std::exchange(other.bwd_, nullptr);
    }
    return *this;
  }

  ~FftPlan() { release(); }

  [[nodiscard]] int size() const noexcept { return size_; }

  [[nodiscard]] std::span<std::complex<double>> buffer() noexcept {
    return {reinterpret_cast<std::complex<double>*>(buf_), static_cast<std::size_t>(size_)};
  }

  /// b_k = sum_j a_j exp(-2 pi i j k / M), unnormalized.
  void forward() noexcept { fftw_execute(fwd_); }
  /// a_j = sum_k b_k exp(+2 pi i j k / M), unnormalized.
  void backward() noexcept { fftw_execute(bwd_); }

 private:
  void release() noexcept {
    if (buf_ == nullptr) return;
    {
      std::lock_guard lock(fftw_planner_mutex());
      if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
      if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
    }
    fftw_free(buf_);
    buf_ = nullptr;
  }

  int size_ = 0;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace ptkr::detail

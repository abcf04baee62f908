#pragma once

// Thin RAII wrappers over FFTW. Planning is not thread-safe in FFTW, so plan
// creation and destruction go through one process-wide mutex; execution on a
// plan's own buffers is safe from the owning thread.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstring>
#include <mutex>
#include <new>

namespace randwave::detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

/// Real-output inverse transform of length n:
///   y_j = sum_{k=0}^{n-1} X_k exp(2 pi i j k / n), X Hermitian.
/// Only X_0 .. X_{n/2} are stored.
class InverseRealFft {
 public:
  explicit InverseRealFft(int n) : n_(n) {
    in_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    out_ = fftw_alloc_real(static_cast<std::size_t>(n));
    if (!in_ || !out_) {
      release();
      throw std::bad_alloc();
    }
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_c2r_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~InverseRealFft() { release(); }
  InverseRealFft(const InverseRealFft&) = delete;
  InverseRealFft& operator=(const InverseRealFft&) = delete;

  int size() const { return n_; }

  std::complex<double>* input() { return reinterpret_cast<std::complex<double>*>(in_); }
  const double* output() const { return out_; }

  void clear_input() { std::memset(in_, 0, sizeof(fftw_complex) * static_cast<std::size_t>(n_ / 2 + 1)); }

  // FFTW's c2r destroys its input; callers refill before every execute().
  void execute() { fftw_execute(plan_); }

 private:
  void release() {
    if (plan_) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
      plan_ = nullptr;
    }
    if (in_) fftw_free(in_);
    if (out_) fftw_free(out_);
    in_ = nullptr;
    out_ = nullptr;
  }

  int n_;
  fftw_complex* in_ = nullptr;
  double* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

/// Backward complex 2-D transform on an n x n grid, in place.
class InverseFft2d {
 public:
  explicit InverseFft2d(int n) : n_(n) {
    buf_ = fftw_alloc_complex(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    if (!buf_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~InverseFft2d() {
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(buf_);
  }
  InverseFft2d(const InverseFft2d&) = delete;
  InverseFft2d& operator=(const InverseFft2d&) = delete;

  int size() const { return n_; }
  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
  void clear() {
    std::memset(buf_, 0, sizeof(fftw_complex) * static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
  }
  void execute() { fftw_execute(plan_); }

 private:
  int n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace randwave::detail

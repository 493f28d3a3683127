#pragma once

#include <fftw3.h>

#include <complex>
#include <vector>

namespace branchkit {

// Complex FFT of fixed length backed by FFTW. forward() computes
// X_k = sum_j x_j e^{-2 pi i jk/n}; backward() is unnormalized.
class RingFFT {
 public:
  explicit RingFFT(int n) : n_(n) {
    buf_ = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~RingFFT() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  RingFFT(const RingFFT&) = delete;
  RingFFT& operator=(const RingFFT&) = delete;

  void forward(std::vector<std::complex<double>>& x) { run(fwd_, x); }
  void backward(std::vector<std::complex<double>>& x) { run(bwd_, x); }

  // Signed wavenumber of FFT slot k; the Nyquist slot maps to -n/2.
  int wavenumber(int k) const { return k < n_ / 2 ? k : k - n_; }

 private:
  void run(fftw_plan plan, std::vector<std::complex<double>>& x) {
    for (int i = 0; i < n_; ++i) {
      buf_[i][0] = x[i].real();
      buf_[i][1] = x[i].imag();
    }
    fftw_execute(plan);
    for (int i = 0; i < n_; ++i) x[i] = {buf_[i][0], buf_[i][1]};
  }

  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace branchkit

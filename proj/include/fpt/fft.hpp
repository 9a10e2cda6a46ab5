#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fpt {

/// Owning wrapper around a pair of FFTW real-to-complex / complex-to-real plans of
/// one length. Plans are made with FFTW_ESTIMATE so results do not depend on timing.
/// Planning is serialized internally; execution is thread-safe across instances.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  /// in.size() <= n; zero padded.
  void forward(std::span<const double> in, std::vector<std::complex<double>>& out);
  /// Unnormalized inverse: returns n times the input signal after a forward pass.
  void inverse(std::span<const std::complex<double>> in, std::vector<double>& out);

 private:
  int n_;
  double* real_ = nullptr;
  void* spec_ = nullptr;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
};

/// c[n] = sum_{m=0}^{n} a[m] b[n-m] for n < a.size(); a and b have equal length.
std::vector<double> causal_convolve_fft(std::span<const double> a, std::span<const double> b);
std::vector<double> causal_convolve_direct(std::span<const double> a, std::span<const double> b);

/// Smallest length >= n of the form 2^p 3^q 5^r.
int fft_size(int n);

}  // namespace fpt

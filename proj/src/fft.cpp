#include "fpt/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "fpt/errors.hpp"

namespace fpt {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 1) throw UsageError("fft: length must be >= 1");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(n / 2 + 1);
  spec_ = spec;
  plan_fwd_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
  if (!real_ || !spec || !plan_fwd_ || !plan_inv_) throw NumericalError("fft: planning failed");
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward(std::span<const double> in, std::vector<std::complex<double>>& out) {
  if (static_cast<int>(in.size()) > n_) throw UsageError("fft: input longer than transform");
  std::memcpy(real_, in.data(), in.size() * sizeof(double));
  std::fill(real_ + in.size(), real_ + n_, 0.0);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  out.resize(spectrum_size());
  std::memcpy(out.data(), spec_, out.size() * sizeof(fftw_complex));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::vector<double>& out) {
  if (static_cast<int>(in.size()) != spectrum_size()) throw UsageError("fft: spectrum size mismatch");
  // c2r overwrites its input, so copy into the owned buffer first
  std::memcpy(spec_, in.data(), in.size() * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  out.assign(real_, real_ + n_);
}

int fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::vector<double> causal_convolve_fft(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("convolve: length mismatch");
  const int n = static_cast<int>(a.size());
  if (n == 0) return {};
  RealFft fft(fft_size(2 * n));
  std::vector<std::complex<double>> fa, fb;
  fft.forward(a, fa);
  fft.forward(b, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> c;
  fft.inverse(fa, c);
  c.resize(n);
  for (double& v : c) v /= fft.size();
  return c;
}

std::vector<double> causal_convolve_direct(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("convolve: length mismatch");
  std::vector<double> c(a.size(), 0.0);
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (std::size_t m = 0; m <= n; ++m) c[n] += a[m] * b[n - m];
  }
  return c;
}

}  // namespace fpt

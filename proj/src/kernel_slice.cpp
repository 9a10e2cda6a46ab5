#include <cmath>
#include <numbers>

#include "fpt/errors.hpp"
#include "fpt/kernel.hpp"
#include "fpt/specfun.hpp"
#include "kernel_detail.hpp"

namespace fpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailLimit = 1e-6;

void require_nonzero_drift(const LsbmSpec& lsbm) {
  if (lsbm.beta == 0.0) {
    throw UnsupportedError("complex kernel routes need beta != 0 (perturb beta or use plancherel)");
  }
}

// Ei-form bracket e^{-|x1| alpha} [Ei(-|x1|(alpha+w)) - Ei(-|x1|(alpha-w))] expressed
// with e^z E1(z) so that neither exponential overflows.
cplx vg_bracket(double ax, double alpha, cplx w) {
  if (ax == 0.0) return std::log(alpha + w) - std::log(alpha - w);
  const cplx plus = specfun::expint_e1_scaled(ax * (alpha + w));
  const cplx minus = specfun::expint_e1_scaled(ax * (alpha - w));
  return std::exp(-ax * alpha) * (minus - plus);
}

}  // namespace

KernelSlice::KernelSlice(const LsbmSpec& lsbm, double x0, double x1, const QuadratureConfig& cfg,
                         Form form) {
  cfg.validate();
  detail::require_positive_level(x0);
  require_nonzero_drift(lsbm);
  const double beta = lsbm.beta;
  const double ax = std::abs(x1);
  const cplx i(0.0, 1.0);

  const bool vg = lsbm.is_variance_gamma() && lsbm.vg().b == 0.0;
  if (form == Form::kEi && !vg) {
    throw UnsupportedError("Ei kernel form needs a variance gamma model with b = 0");
  }
  if (form == Form::kEi || (form == Form::kAuto && vg)) {
    const double nu = lsbm.vg().nu;
    const double alpha = lsbm.alpha();
    const double extent = detail::theta_extent(beta, x0 * std::abs(beta), cfg);
    const bool capped = extent >= detail::theta_cap(beta, cfg);
    const auto nodes = detail::theta_nodes(beta, extent, detail::theta_step(extent, cfg), capped);
    const std::size_t n = nodes.z.size();
    exponent_.resize(n);
    fine_.resize(n);
    coarse_.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx w = nodes.w[k];
      exponent_[k] = std::log(1.0 + i * (nu * nodes.z[k])) / nu;
      const double weight = (k == 0 ? 0.5 : 1.0) * nodes.dz[k];
      const cplx f = std::exp(-x0 * w) / w * vg_bracket(ax, alpha, w);
      fine_[k] = weight * f;
      if (k % 2 == 0) coarse_[k] = 2.0 * fine_[k];
    }
    prefactor_ = std::exp(beta * (x1 - x0)) / (2.0 * kPi * nu);
    tail_ = n >= 2 && capped ? detail::tail_estimate(std::abs(fine_[n - 1]), std::abs(fine_[n - 2]))
                             : 0.0;
  } else {
    // Two-dimensional form. theta1 >= 0 carries e^{-x0 w1} and the time dependence,
    // theta2 runs over the whole line and carries e^{-|x1| w2}/w2. Both use the same
    // step so diagonal nodes coincide exactly and take psi'.
    const auto& sub = lsbm.subordinator;
    const double ext1 = detail::theta_extent(beta, x0 * std::abs(beta), cfg);
    const double ext2 = detail::theta_extent(beta, ax * std::abs(beta), cfg);
    const double cap = detail::theta_cap(beta, cfg);
    const double h = std::min(detail::theta_step(ext1, cfg), detail::theta_step(ext2, cfg));
    const auto n1 = detail::theta_nodes(beta, ext1, h, ext1 >= cap);
    const auto n2 = detail::theta_nodes(beta, ext2, h, ext2 >= cap);
    const std::size_t m1 = n1.z.size();
    const std::size_t m2 = n2.z.size();

    std::vector<cplx> psi2(m2), psi2m(m2), g2(m2), g2m(m2);
    for (std::size_t j = 0; j < m2; ++j) {
      psi2[j] = laplace_exponent(sub, i * n2.z[j]);
      psi2m[j] = std::conj(psi2[j]);  // psi(-iz) = conj(psi(iz))
      const cplx w = n2.w[j];
      g2[j] = n2.dz[j] * std::exp(-ax * w) / w;
      g2m[j] = std::conj(g2[j]);
    }

    exponent_.resize(m1);
    fine_.resize(m1);
    coarse_.assign(m1, 0.0);
    std::vector<double> col_mag(m2, 0.0);
    std::vector<double> row_mag(m1, 0.0);
    for (std::size_t k = 0; k < m1; ++k) {
      const double z1 = n1.z[k];
      const cplx psi1 = laplace_exponent(sub, i * z1);
      const cplx dpsi1 = laplace_exponent_derivative(sub, i * z1);
      exponent_[k] = psi1;
      cplx fine = 0.0, coarse = 0.0;
      double mag = 0.0;
      auto add = [&](std::size_t j, double z2, cplx p2, cplx g) {
        const cplx d = (z1 == z2) ? dpsi1 : (psi1 - p2) / (i * (z1 - z2));
        const cplx t = d * g;
        fine += t;
        if (j % 2 == 0) coarse += 2.0 * t;
        const double a = std::abs(t);
        mag += a;
        col_mag[j] += a;
      };
      add(0, n2.z[0], psi2[0], g2[0]);
      for (std::size_t j = 1; j < m2; ++j) {
        add(j, n2.z[j], psi2[j], g2[j]);
        add(j, -n2.z[j], psi2m[j], g2m[j]);
      }
      const double weight = (k == 0 ? 0.5 : 1.0) * n1.dz[k];
      const cplx e1 = weight * std::exp(-x0 * n1.w[k]);
      fine_[k] = e1 * fine;
      if (k % 2 == 0) coarse_[k] = 2.0 * e1 * coarse;
      row_mag[k] = std::abs(e1) * mag;
    }
    prefactor_ = std::exp(beta * (x1 - x0)) / (4.0 * kPi * kPi);
    tail_ = 0.0;
    if (n1.capped && m1 >= 2) tail_ += detail::tail_estimate(row_mag[m1 - 1], row_mag[m1 - 2]);
    if (n2.capped && m2 >= 2) {
      // column magnitudes still need the theta1 weights; bound them by the largest one
      double wmax = 0.0;
      for (std::size_t k = 0; k < m1; ++k) {
        wmax = std::max(wmax, std::abs((k == 0 ? 0.5 : 1.0) * n1.dz[k] * std::exp(-x0 * n1.w[k])));
      }
      tail_ += wmax * detail::tail_estimate(col_mag[m2 - 1], col_mag[m2 - 2]);
    }
  }
  tail_ *= 2.0 * std::abs(prefactor_);
  if (tail_ > kTailLimit) {
    throw AccuracyError("kernel: integrand tail not negligible at the truncation cap", tail_);
  }
}

KernelValue KernelSlice::finish(double fine_sum, double coarse_sum) const {
  const double value = 2.0 * prefactor_ * fine_sum;
  const double coarse = 2.0 * prefactor_ * coarse_sum;
  return detail::clamp_value(value, std::abs(value - coarse) + tail_, "kernel");
}

KernelValue KernelSlice::at(double s) const {
  if (!(s > 0.0)) throw DomainError("kernel: s must be > 0");
  double fine = 0.0, coarse = 0.0;
  for (std::size_t k = 0; k < fine_.size(); ++k) {
    const cplx e = std::exp(-s * exponent_[k]);
    fine += (e * fine_[k]).real();
    coarse += (e * coarse_[k]).real();
  }
  return finish(fine, coarse);
}

std::vector<KernelValue> KernelSlice::progression(double s0, double ds, int count) const {
  if (!(s0 > 0.0) || !(ds > 0.0) || count < 0) {
    throw DomainError("kernel: progression needs s0 > 0, ds > 0");
  }
  const std::size_t n = fine_.size();
  std::vector<cplx> cur(n), step(n);
  for (std::size_t k = 0; k < n; ++k) {
    cur[k] = std::exp(-s0 * exponent_[k]);
    step[k] = std::exp(-ds * exponent_[k]);
  }
  std::vector<KernelValue> out;
  out.reserve(count);
  for (int m = 0; m < count; ++m) {
    double fine = 0.0, coarse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      fine += (cur[k] * fine_[k]).real();
      coarse += (cur[k] * coarse_[k]).real();
      cur[k] *= step[k];
    }
    out.push_back(finish(fine, coarse));
  }
  return out;
}

KernelValue p1_vg(const LsbmSpec& lsbm, double x0, double s, double x1,
                  const QuadratureConfig& cfg) {
  detail::require_vg_without_drift(lsbm);
  return KernelSlice(lsbm, x0, x1, cfg, KernelSlice::Form::kEi).at(s);
}

KernelValue p1_generic(const LsbmSpec& lsbm, double x0, double s, double x1,
                       const QuadratureConfig& cfg) {
  return KernelSlice(lsbm, x0, x1, cfg, KernelSlice::Form::kComplex2d).at(s);
}

}  // namespace fpt

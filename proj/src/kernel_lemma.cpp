#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <numbers>

#include "fpt/errors.hpp"
#include "fpt/kernel.hpp"
#include "kernel_detail.hpp"

namespace fpt {

namespace {

using boost::math::quadrature::ooura_fourier_cos;
using boost::math::quadrature::ooura_fourier_sin;

constexpr double kPi = std::numbers::pi;

ooura_fourier_cos<double>& cosine_transform() {
  thread_local ooura_fourier_cos<double> q(1e-10);
  return q;
}

ooura_fourier_sin<double>& sine_transform() {
  thread_local ooura_fourier_sin<double> q(1e-10);
  return q;
}

// int_0^inf cos(omega z) g(z) dz, including omega = 0
template <class F>
double cosine_integral(F g, double omega) {
  if (omega > 0.0) return cosine_transform().integrate(g, omega).first;
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate(g, 0.0, std::numeric_limits<double>::infinity());
}

// Distance from the real axis to the nearest singularity of psi((z^2 + beta^2)/2).
double max_contour_shift(const LsbmSpec& lsbm) {
  const double b2 = lsbm.beta * lsbm.beta;
  return std::visit(
      [b2](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, VarianceGammaSubordinator>) return std::sqrt(2.0 / p.nu + b2);
        else if constexpr (std::is_same_v<T, NigSubordinator>) return std::sqrt(p.beta_tilde * p.beta_tilde + b2);
        else return std::sqrt(2.0 * p.a + b2);
      },
      lsbm.subordinator);
}

}  // namespace

double survival_density(const LsbmSpec& lsbm, double x0, double s, double y,
                        const QuadratureConfig& cfg) {
  cfg.validate();
  detail::require_positive_level(x0);
  if (!(s > 0.0)) throw DomainError("survival_density: s must be > 0");
  if (y <= 0.0) return 0.0;
  const double beta = lsbm.beta;
  auto e = [&](double z) {
    return std::exp(-s * laplace_exponent(lsbm.subordinator, 0.5 * (z * z + beta * beta)));
  };
  const double direct = cosine_integral(e, std::abs(x0 - y));
  const double image = cosine_integral(e, x0 + y);
  return std::max(0.0, std::exp(beta * (y - x0)) / kPi * (direct - image));
}

double crossing_density(const LsbmSpec& lsbm, double x0, double s, double y,
                        const QuadratureConfig& cfg) {
  cfg.validate();
  detail::require_positive_level(x0);
  if (!(s > 0.0)) throw DomainError("crossing_density: s must be > 0");
  const double eps = cfg.contour_shift;
  if (!(eps < max_contour_shift(lsbm))) {
    throw DomainError("crossing_density: contour_shift reaches a singularity of the exponent");
  }
  const double beta = lsbm.beta;
  const double l = x0 + std::abs(y);
  auto e = [&](double t) {
    const cplx z(t, eps);
    return std::exp(-s * laplace_exponent(lsbm.subordinator, 0.5 * (z * z + beta * beta)));
  };
  const double c = cosine_transform().integrate([&](double t) { return e(t).real(); }, l).first;
  const double sn = sine_transform().integrate([&](double t) { return e(t).imag(); }, l).first;
  return std::max(0.0, std::exp(beta * (y - x0) - eps * l) / kPi * (c - sn));
}

}  // namespace fpt

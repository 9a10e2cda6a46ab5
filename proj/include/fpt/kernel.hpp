#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpt/levy_models.hpp"

namespace fpt {

/// Controls for the kernel quadratures.
///
/// The complex routes integrate over the real line through z = (beta^2/2) sinh(2 theta),
/// which maps sqrt(beta^2 - 2iz) onto |beta| (cosh theta - i sinh theta), and apply the
/// trapezoid rule in theta. `truncation` caps |z|; `n_points` is the minimum number of
/// trapezoid nodes per half line. `pv_excision` is the half-width of the window around
/// the removable singularity of the real form where a Taylor value replaces the
/// difference quotient. `contour_shift` is the epsilon of the crossing density.
struct QuadratureConfig {
  double truncation = 1e12;
  int n_points = 128;
  double pv_excision = 1e-4;
  double contour_shift = 0.5;

  void validate() const;
};

nlohmann::json to_json(const QuadratureConfig& cfg);
QuadratureConfig quadrature_from_json(const nlohmann::json& j);

struct KernelValue {
  double value = 0.0;           // clamped at 0
  double error_estimate = 0.0;  // absolute
  double pre_clamp = 0.0;       // value before clamping
};

enum class KernelRoute { kGeneric, kGenericReal, kVg, kPlancherel, kS0, kAuto };

KernelRoute route_from_string(const std::string& name);
std::string to_string(KernelRoute route);

/// p*_1(x0; s, x1) from the two-dimensional complex integral. Any family, beta != 0.
KernelValue p1_generic(const LsbmSpec& lsbm, double x0, double s, double x1,
                       const QuadratureConfig& cfg = {});

/// Same density from the real principal-value form.
KernelValue p1_generic_real(const LsbmSpec& lsbm, double x0, double s, double x1,
                            const QuadratureConfig& cfg = {});

/// Variance gamma (b = 0) one-dimensional form built from Ei.
KernelValue p1_vg(const LsbmSpec& lsbm, double x0, double s, double x1,
                  const QuadratureConfig& cfg = {});

/// Variance gamma (b = 0) Plancherel / Bessel K form, valid down to s = 0.
KernelValue p1_vg_plancherel(const LsbmSpec& lsbm, double x0, double s, double x1,
                             const QuadratureConfig& cfg = {});

/// Closed form at s = 0 for variance gamma (b = 0).
double p1_vg_s0(const LsbmSpec& lsbm, double x0, double x1);

/// Dispatches on `route`. kAuto picks s0 at s = 0, Plancherel when
/// s alpha^2 nu / 2 < 0.05, the Ei form otherwise for variance gamma with b = 0,
/// and the complex generic form for everything else.
KernelValue p1(const LsbmSpec& lsbm, double x0, double s, double x1, KernelRoute route,
               const QuadratureConfig& cfg = {});

/// Density of X_s on {s < t*_1} started from x0 (zero for y <= 0).
double survival_density(const LsbmSpec& lsbm, double x0, double s, double y,
                        const QuadratureConfig& cfg = {});

/// Density of X_s on {s >= t*_1} started from x0, along the shifted contour
/// Im z = cfg.contour_shift.
double crossing_density(const LsbmSpec& lsbm, double x0, double s, double y,
                        const QuadratureConfig& cfg = {});

/// Many times at one (x0, x1). The expensive part of the quadrature depends only on
/// (x0, x1); each time then costs one pass over the nodes. Times must be > 0.
/// kAuto uses the Ei form for variance gamma with b = 0 and the complex
/// two-dimensional form otherwise. Needs beta != 0.
class KernelSlice {
 public:
  enum class Form { kAuto, kEi, kComplex2d };

  KernelSlice(const LsbmSpec& lsbm, double x0, double x1, const QuadratureConfig& cfg = {},
              Form form = Form::kAuto);

  KernelValue at(double s) const;
  /// Values at s_m = s0 + m ds, m = 0..count-1.
  std::vector<KernelValue> progression(double s0, double ds, int count) const;

 private:
  double prefactor_ = 0.0;
  double tail_ = 0.0;
  std::vector<cplx> exponent_;  // psi(i z_n)
  std::vector<cplx> fine_;      // node weights times the s-independent integrand
  std::vector<cplx> coarse_;    // same on every other node with doubled weights

  KernelValue finish(double fine_sum, double coarse_sum) const;
};

}  // namespace fpt

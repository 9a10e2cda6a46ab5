#include "fpt/kernel.hpp"

#include <cmath>
#include <set>

#include "fpt/errors.hpp"
#include "kernel_detail.hpp"

namespace fpt {

void QuadratureConfig::validate() const {
  if (!(truncation > 0.0)) throw DomainError("quadrature: truncation must be > 0");
  if (n_points < 64) throw DomainError("quadrature: n_points must be >= 64");
  if (!(pv_excision > 0.0)) throw DomainError("quadrature: pv_excision must be > 0");
  if (!(contour_shift > 0.0)) throw DomainError("quadrature: contour_shift must be > 0");
}

nlohmann::json to_json(const QuadratureConfig& cfg) {
  return nlohmann::json{{"truncation", cfg.truncation},
                        {"n_points", cfg.n_points},
                        {"pv_excision", cfg.pv_excision},
                        {"contour_shift", cfg.contour_shift}};
}

QuadratureConfig quadrature_from_json(const nlohmann::json& j) {
  static const std::set<std::string> keys = {"truncation", "n_points", "pv_excision",
                                             "contour_shift"};
  if (!j.is_object()) throw UsageError("quadrature: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!keys.count(key)) throw UsageError("quadrature: unknown key '" + key + "'");
  }
  QuadratureConfig cfg;
  cfg.truncation = j.value("truncation", cfg.truncation);
  cfg.n_points = j.value("n_points", cfg.n_points);
  cfg.pv_excision = j.value("pv_excision", cfg.pv_excision);
  cfg.contour_shift = j.value("contour_shift", cfg.contour_shift);
  cfg.validate();
  return cfg;
}

KernelRoute route_from_string(const std::string& name) {
  if (name == "generic") return KernelRoute::kGeneric;
  if (name == "generic_real") return KernelRoute::kGenericReal;
  if (name == "vg") return KernelRoute::kVg;
  if (name == "plancherel") return KernelRoute::kPlancherel;
  if (name == "s0") return KernelRoute::kS0;
  if (name == "auto") return KernelRoute::kAuto;
  throw UsageError("unknown kernel route '" + name + "'");
}

std::string to_string(KernelRoute route) {
  switch (route) {
    case KernelRoute::kGeneric: return "generic";
    case KernelRoute::kGenericReal: return "generic_real";
    case KernelRoute::kVg: return "vg";
    case KernelRoute::kPlancherel: return "plancherel";
    case KernelRoute::kS0: return "s0";
    case KernelRoute::kAuto: return "auto";
  }
  return "?";
}

namespace detail {

namespace {
constexpr double kEnvelope = 40.0;
constexpr double kMaxStep = 0.1;
}  // namespace

double theta_cap(double beta, const QuadratureConfig& cfg) {
  return 0.5 * std::asinh(2.0 * cfg.truncation / (beta * beta));
}

double theta_extent(double beta, double c, const QuadratureConfig& cfg) {
  const double cap = theta_cap(beta, cfg);
  if (!(c > 0.0)) return cap;
  // smallest theta with c cosh(theta) - 2 theta >= kEnvelope (dz grows like e^{2 theta})
  double theta = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double next = std::acosh(std::max(1.0, (kEnvelope + 2.0 * theta) / c));
    if (std::abs(next - theta) < 1e-10) break;
    theta = next;
  }
  return std::min(theta, cap);
}

double theta_step(double extent, const QuadratureConfig& cfg) {
  return std::min(kMaxStep, extent / cfg.n_points);
}

ThetaNodes theta_nodes(double beta, double extent, double h, bool capped) {
  int count = int(std::ceil(extent / h)) + 1;
  if (count % 2 == 0) ++count;
  ThetaNodes n;
  n.h = h;
  n.capped = capped;
  n.z.resize(count);
  n.w.resize(count);
  n.dz.resize(count);
  const double b = std::abs(beta);
  for (int k = 0; k < count; ++k) {
    const double t = k * h;
    n.z[k] = 0.5 * beta * beta * std::sinh(2.0 * t);
    n.w[k] = cplx(b * std::cosh(t), -b * std::sinh(t));
    n.dz[k] = h * beta * beta * std::cosh(2.0 * t);
  }
  return n;
}

double tail_estimate(double last, double before_last) {
  if (last == 0.0) return 0.0;
  if (!(before_last > last)) return std::numeric_limits<double>::infinity();
  const double ratio = last / before_last;
  return last * ratio / (1.0 - ratio);
}

void require_positive_level(double x0) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("kernel: x0 must be > 0");
}

void require_vg_without_drift(const LsbmSpec& lsbm) {
  if (!lsbm.is_variance_gamma()) {
    throw UnsupportedError("route needs a variance gamma model, got " +
                           family_name(lsbm.subordinator));
  }
  if (lsbm.vg().b != 0.0) throw UnsupportedError("route needs a variance gamma model with b = 0");
}

KernelValue clamp_value(double raw, double error, const char* route) {
  if (!std::isfinite(raw)) throw NumericalError(std::string(route) + ": non-finite value");
  if (raw < 0.0 && -raw > std::max(1e-6, 2.0 * error)) {
    throw AccuracyError(std::string(route) + ": negative density beyond quadrature error", raw);
  }
  return KernelValue{std::max(raw, 0.0), error, raw};
}

}  // namespace detail

double p1_vg_s0(const LsbmSpec& lsbm, double x0, double x1) {
  detail::require_vg_without_drift(lsbm);
  const double d = x0 + std::abs(x1);
  if (!(d > 0.0)) throw DomainError("p1_vg_s0: x0 + |x1| must be > 0");
  const double nu = lsbm.vg().nu;
  return std::exp(lsbm.beta * (x1 - x0) - lsbm.alpha() * d) / (nu * d);
}

KernelValue p1(const LsbmSpec& lsbm, double x0, double s, double x1, KernelRoute route,
               const QuadratureConfig& cfg) {
  switch (route) {
    case KernelRoute::kGeneric: return p1_generic(lsbm, x0, s, x1, cfg);
    case KernelRoute::kGenericReal: return p1_generic_real(lsbm, x0, s, x1, cfg);
    case KernelRoute::kVg: return p1_vg(lsbm, x0, s, x1, cfg);
    case KernelRoute::kPlancherel: return p1_vg_plancherel(lsbm, x0, s, x1, cfg);
    case KernelRoute::kS0: {
      if (s != 0.0) throw UsageError("route s0 is only defined at s = 0");
      const double v = p1_vg_s0(lsbm, x0, x1);
      return KernelValue{v, 0.0, v};
    }
    case KernelRoute::kAuto: break;
  }
  const bool vg = lsbm.is_variance_gamma() && lsbm.vg().b == 0.0;
  if (vg) {
    if (s == 0.0) return p1(lsbm, x0, s, x1, KernelRoute::kS0, cfg);
    const double a = lsbm.alpha();
    if (s * a * a * lsbm.vg().nu / 2.0 < 0.05) return p1_vg_plancherel(lsbm, x0, s, x1, cfg);
    return p1_vg(lsbm, x0, s, x1, cfg);
  }
  return p1_generic(lsbm, x0, s, x1, cfg);
}

}  // namespace fpt

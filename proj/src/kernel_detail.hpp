#pragma once

#include <vector>

#include "fpt/kernel.hpp"

namespace fpt::detail {

// Trapezoid nodes theta_k = k h, k = 0..count-1 (count odd, so the coarse rule
// on every other node ends on the same point). z = (beta^2/2) sinh(2 theta),
// w = sqrt(beta^2 - 2iz) = |beta| (cosh theta - i sinh theta), dz = h dz/dtheta.
struct ThetaNodes {
  double h = 0.0;
  bool capped = false;  // stopped at cfg.truncation rather than at the envelope
  std::vector<double> z;
  std::vector<cplx> w;
  std::vector<double> dz;
};

// Decay rate c: the integrand carries exp(-c Re w). Envelope threshold is e^{-40}.
double theta_extent(double beta, double c, const QuadratureConfig& cfg);
double theta_cap(double beta, const QuadratureConfig& cfg);
ThetaNodes theta_nodes(double beta, double extent, double h, bool capped);
double theta_step(double extent, const QuadratureConfig& cfg);

// Sum of a geometric-looking tail from the magnitudes of the last two terms.
double tail_estimate(double last, double before_last);

void require_positive_level(double x0);
void require_vg_without_drift(const LsbmSpec& lsbm);

KernelValue clamp_value(double raw, double error, const char* route);

}  // namespace fpt::detail

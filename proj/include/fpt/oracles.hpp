#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpt/levy_models.hpp"

namespace fpt {

/// Space grid x_m = -X + (m + 1/2) dx, m < n_x, dx = 2X/n_x; time step T/n_t.
struct FdConfig {
  int n_t = 1000;
  int n_x = 10000;
  double X = 15.0;

  void validate() const;
};

/// p[center + j] is the probability of a move by j dx over one step, j in [-n_x, n_x).
struct TransitionRow {
  std::vector<double> p;
  int center = 0;
  double dx = 0.0;
  double clamped_mass = 0.0;  // negative mass removed before normalizing
};

TransitionRow transition_row(const LsbmSpec& lsbm, double dt, int n_x, double X);

struct FdResult {
  std::vector<double> t;        // step midpoints (i + 1/2) dt
  std::vector<double> density;  // (f_i(x0) - f_{i+1}(x0)) / dt
  std::vector<double> survival;  // f_i(x0), i = 0..n_t
  double max_survival_increase = 0.0;  // max over i, x of f_{i+1}(x) - f_i(x)
};

FdResult fd_first_passage(const LsbmSpec& lsbm, double x0, double T, const FdConfig& cfg);

/// One increment of the subordinator over a step dt: exact gamma for variance gamma,
/// inverse Gaussian for NIG, drift plus compound Poisson (rate c, Exp(a) jumps) for the
/// exponential family.
double clock_increment(const SubordinatorSpec& spec, double dt, std::mt19937_64& rng);

struct McConfig {
  long n_paths = 100000;
  double dt_sim = 1e-3;
  std::uint64_t seed = 1;
  double T = 5.0;
  double bucket = 0.1;

  void validate() const;
};

struct McResult {
  std::vector<double> t_lo;  // bucket edges
  std::vector<double> t_hi;
  std::vector<long> counts;  // passages per bucket
  std::vector<double> density;
  std::vector<double> density_stderr;
  std::vector<double> survival;  // at bucket end
  std::vector<double> survival_stderr;
  long n_paths = 0;
  long passed = 0;  // passages before T
};

McResult mc_first_passage(const LsbmSpec& lsbm, double x0, const McConfig& cfg);

std::string fd_csv(const FdResult& r);
std::string mc_csv(const McResult& r);

nlohmann::json to_json(const FdConfig& c);
FdConfig fd_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const McConfig& c);
McConfig mc_config_from_json(const nlohmann::json& j);

}  // namespace fpt

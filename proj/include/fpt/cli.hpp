#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpt/iteration.hpp"
#include "fpt/kernel.hpp"
#include "fpt/oracles.hpp"

namespace fpt::cli {

enum ExitCode { kOk = 0, kIo = 1, kUsage = 2, kNumerical = 3 };

struct GridSettings {
  int n_t = 50;
  int n_x = 10;
  double X = 10.0;
  GridLaw law = GridLaw::kQuadratic;
  int gauss_t = 2;
  int gauss_x = 3;
};

struct IterationSettings {
  int n_iter = 3;
  double tol = 0.0;  // 0 runs all n_iter iterates
};

struct RunConfig {
  LsbmSpec model = make_lsbm(0.2, make_variance_gamma(1.0));
  double x0 = 0.5;
  double T = 5.0;
  GridSettings grid;
  IterationSettings iteration;
  QuadratureConfig quadrature;
  FdConfig fd;
  McConfig mc;
  std::string out = "out";

  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Missing keys take defaults; unknown keys are rejected with UsageError.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Built-in parameter sets "I" (beta = 0.2, nu = 1) and "II" (beta = -0.2, nu = 2),
/// both with x0 = 0.5 on [0, 5], N_t = 50, N_x = 10.
RunConfig builtin_set(const std::string& name);

SpaceTimeGrid make_grid(const RunConfig& c);

struct KernelRequest {
  double x0 = 0.5;
  double s = 1.0;
  double x1 = -0.25;
  KernelRoute route = KernelRoute::kAuto;
};

void cmd_kernel(const RunConfig& c, const KernelRequest& r, std::ostream& log);
void cmd_solve(const RunConfig& c, std::ostream& log);
void cmd_oracle(const RunConfig& c, const std::string& which, std::ostream& log);
void cmd_compare(const std::filesystem::path& solve_csv, const std::filesystem::path& oracle_csv,
                 const std::filesystem::path& out_dir, std::ostream& log);
void cmd_bench(const RunConfig& c, std::ostream& log);

struct CompareReport {
  std::vector<double> l1;
  std::vector<double> log10_l1;
  bool plateau = false;
};

/// Per-iterate L1 distance between solve columns and an oracle density, both linearly
/// interpolated onto the finer of the two time grids.
CompareReport compare_tables(const std::string& solve_csv, const std::string& oracle_csv);

/// Full command line, argv[0] excluded. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpt::cli

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>
#include <system_error>

#include "fpt/cli.hpp"
#include "fpt/errors.hpp"
#include "fpt/io.hpp"

namespace fpt::cli {

namespace {

RunConfig load_config(const std::string& path, const std::string& set) {
  if (!path.empty() && !set.empty()) throw UsageError("--config and --set are mutually exclusive");
  if (!set.empty()) return builtin_set(set);
  if (path.empty()) return builtin_set("I");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"First-passage densities of subordinated Brownian motions"};
  app.require_subcommand(1, 1);

  std::string config_path, set, out_dir, route = "auto", which, solve_csv, oracle_csv;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_iter;
  KernelRequest req;
  std::optional<double> x0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--set", set, "built-in parameter set")->check(CLI::IsMember({"I", "II"}));
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "Monte Carlo seed");
  };
  auto* kernel = app.add_subcommand("kernel", "evaluate p*_1(x0; s, x1)");
  common(kernel);
  kernel->add_option("--route", route, "generic|generic_real|vg|plancherel|s0|auto");
  kernel->add_option("--x0", x0, "starting level (default: config x0)");
  kernel->add_option("--s", req.s, "time");
  kernel->add_option("--x1", req.x1, "overshoot location");

  auto* solve = app.add_subcommand("solve", "iterate the kernel on the grid");
  common(solve);
  solve->add_option("--n-iter", n_iter, "number of iterates");

  auto* oracle = app.add_subcommand("oracle", "finite-difference or Monte Carlo reference");
  common(oracle);
  oracle->add_option("--which", which, "fd|mc")->required()->check(CLI::IsMember({"fd", "mc"}));

  auto* compare = app.add_subcommand("compare", "L1 error of each iterate against an oracle");
  compare->add_option("solve_csv", solve_csv, "p_star_iterates.csv")->required();
  compare->add_option("oracle_csv", oracle_csv, "fd_reference.csv or mc_survival.csv")->required();
  compare->add_option("--out", out_dir, "output directory");

  auto* bench = app.add_subcommand("bench", "timing and convergence tables");
  common(bench);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (compare->parsed()) {
      cmd_compare(solve_csv, oracle_csv, out_dir.empty() ? std::string("out") : out_dir, out);
      return kOk;
    }
    RunConfig c = load_config(config_path, set);
    if (!out_dir.empty()) c.out = out_dir;
    if (seed) c.mc.seed = *seed;
    if (n_iter) c.iteration.n_iter = *n_iter;
    c.validate();

    if (kernel->parsed()) {
      req.x0 = x0.value_or(c.x0);
      req.route = route_from_string(route);
      cmd_kernel(c, req, out);
    } else if (solve->parsed()) {
      cmd_solve(c, out);
    } else if (oracle->parsed()) {
      cmd_oracle(c, which, out);
    } else if (bench->parsed()) {
      cmd_bench(c, out);
    }
    return kOk;
  } catch (const std::system_error& e) {  // includes filesystem errors
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const AccuracyError& e) {
    err << "numerical failure: " << e.what() << " (residual " << format_double(e.residual()) << ")\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace fpt::cli

#include <cmath>
#include <set>

#include "fpt/cli.hpp"
#include "fpt/errors.hpp"

namespace fpt::cli {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& keys, const std::string& what) {
  if (!j.is_object()) throw UsageError(what + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw UsageError(what + ": unknown key '" + k + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw UsageError("config: x0 must be > 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw UsageError("config: T must be > 0");
  if (!(x0 < grid.X)) throw UsageError("config: x0 must lie inside the grid (x0 < X)");
  if (iteration.n_iter < 1 || iteration.n_iter > 64) throw UsageError("config: n_iter must be in 1..64");
  if (!(iteration.tol >= 0.0)) throw UsageError("config: tol must be >= 0");
  fpt::make_grid(T, grid.n_t, grid.n_x, grid.X, grid.law);
  TableOptions{grid.gauss_t, grid.gauss_x, {}}.validate();
  quadrature.validate();
  fd.validate();
  mc.validate();
  if (out.empty()) throw UsageError("config: out must not be empty");
}

nlohmann::json to_json(const RunConfig& c) {
  return {
      {"model", fpt::to_json(c.model)},
      {"x0", c.x0},
      {"T", c.T},
      {"grid",
       {{"n_t", c.grid.n_t},
        {"n_x", c.grid.n_x},
        {"X", c.grid.X},
        {"grid_law", to_string(c.grid.law)},
        {"gauss_t", c.grid.gauss_t},
        {"gauss_x", c.grid.gauss_x}}},
      {"iteration", {{"n_iter", c.iteration.n_iter}, {"tol", c.iteration.tol}}},
      {"quadrature", fpt::to_json(c.quadrature)},
      {"fd", fpt::to_json(c.fd)},
      {"mc", fpt::to_json(c.mc)},
      {"out", c.out},
  };
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"model", "x0", "T", "grid", "iteration", "quadrature", "fd", "mc", "out"}, "config");
  RunConfig c;
  if (j.contains("model")) c.model = lsbm_from_json(j.at("model"));
  c.x0 = j.value("x0", c.x0);
  c.T = j.value("T", c.T);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, {"n_t", "n_x", "X", "grid_law", "gauss_t", "gauss_x"}, "grid");
    c.grid.n_t = g.value("n_t", c.grid.n_t);
    c.grid.n_x = g.value("n_x", c.grid.n_x);
    c.grid.X = g.value("X", c.grid.X);
    if (g.contains("grid_law")) c.grid.law = grid_law_from_string(g.at("grid_law").get<std::string>());
    c.grid.gauss_t = g.value("gauss_t", c.grid.gauss_t);
    c.grid.gauss_x = g.value("gauss_x", c.grid.gauss_x);
  }
  if (j.contains("iteration")) {
    const auto& it = j.at("iteration");
    reject_unknown(it, {"n_iter", "tol"}, "iteration");
    c.iteration.n_iter = it.value("n_iter", c.iteration.n_iter);
    c.iteration.tol = it.value("tol", c.iteration.tol);
  }
  if (j.contains("quadrature")) c.quadrature = quadrature_from_json(j.at("quadrature"));
  if (j.contains("fd")) c.fd = fd_config_from_json(j.at("fd"));
  if (j.contains("mc")) c.mc = mc_config_from_json(j.at("mc"));
  c.out = j.value("out", c.out);
  c.validate();
  return c;
}

RunConfig builtin_set(const std::string& name) {
  RunConfig c;
  if (name == "I") {
    c.model = make_lsbm(0.2, make_variance_gamma(1.0));
  } else if (name == "II") {
    c.model = make_lsbm(-0.2, make_variance_gamma(2.0));
  } else {
    throw UsageError("unknown parameter set '" + name + "' (I|II)");
  }
  c.mc.T = c.T;
  return c;
}

SpaceTimeGrid make_grid(const RunConfig& c) {
  return fpt::make_grid(c.T, c.grid.n_t, c.grid.n_x, c.grid.X, c.grid.law);
}

}  // namespace fpt::cli

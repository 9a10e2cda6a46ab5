#include "fpt/grid.hpp"

#include <cmath>

#include "fpt/errors.hpp"

namespace fpt {

GridLaw grid_law_from_string(const std::string& name) {
  if (name == "linear") return GridLaw::kLinear;
  if (name == "quadratic") return GridLaw::kQuadratic;
  throw UsageError("unknown grid law '" + name + "' (linear|quadratic)");
}

std::string to_string(GridLaw law) { return law == GridLaw::kLinear ? "linear" : "quadratic"; }

SpaceTimeGrid make_grid(double T, int n_t, int n_x, double X, GridLaw law) {
  if (!(T > 0.0) || !std::isfinite(T)) throw UsageError("grid: T must be > 0");
  if (n_t < 1) throw UsageError("grid: n_t must be >= 1");
  if (n_x < 1) throw UsageError("grid: n_x must be >= 1");
  if (!(X > 0.0) || !std::isfinite(X)) throw UsageError("grid: X must be > 0");
  SpaceTimeGrid g;
  g.T = T;
  g.n_t = n_t;
  g.dt = T / n_t;
  g.X = X;
  g.law = law;
  g.x_edges.resize(n_x + 1);
  for (int k = 0; k <= n_x; ++k) {
    const double r = static_cast<double>(k) / n_x;
    g.x_edges[k] = law == GridLaw::kLinear ? X * r : X * r * r;
  }
  g.x_edges[n_x] = X;
  for (int k = 0; k < n_x; ++k) {
    g.x_nodes.push_back(0.5 * (g.x_edges[k] + g.x_edges[k + 1]));
    g.cell_weights.push_back(g.x_edges[k + 1] - g.x_edges[k]);
  }
  for (int k = n_x - 1; k >= 0; --k) g.x_neg_nodes.push_back(-g.x_nodes[k]);
  return g;
}

nlohmann::json to_json(const SpaceTimeGrid& grid) {
  return {{"T", grid.T}, {"n_t", grid.n_t}, {"n_x", grid.n_x()}, {"X", grid.X},
          {"grid_law", to_string(grid.law)}};
}

}  // namespace fpt

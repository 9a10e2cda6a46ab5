#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace fpt {

enum class GridLaw { kLinear, kQuadratic };

GridLaw grid_law_from_string(const std::string& name);
std::string to_string(GridLaw law);

/// Time cells [j dt, (j+1) dt], j = 0..n_t-1, on [0, T]. Space cells on [0, X] with
/// edges X (k/n_x) (linear) or X (k/n_x)^2 (quadratic); nodes are cell midpoints.
/// The negative side mirrors the positive one. Negative cells are stored in
/// ascending order, so x_neg_nodes.front() is the node nearest -X.
struct SpaceTimeGrid {
  double T = 5.0;
  int n_t = 50;
  double dt = 0.1;
  double X = 10.0;
  GridLaw law = GridLaw::kQuadratic;
  std::vector<double> x_edges;      // n_x + 1 edges of the positive cells
  std::vector<double> x_nodes;      // positive midpoints
  std::vector<double> x_neg_nodes;  // mirrored, ascending
  std::vector<double> cell_weights;  // widths of the positive cells

  int n_x() const { return static_cast<int>(x_nodes.size()); }
  double t_mid(int j) const { return (j + 0.5) * dt; }
};

SpaceTimeGrid make_grid(double T, int n_t, int n_x, double X, GridLaw law = GridLaw::kQuadratic);

nlohmann::json to_json(const SpaceTimeGrid& grid);

}  // namespace fpt

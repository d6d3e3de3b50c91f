// Uniform 2D grids, node fields and node masks.
#ifndef INFBERN_GRID_HPP
#define INFBERN_GRID_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace infbern {

using Point = Eigen::Vector2d;
using Index = Eigen::Index;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;

  Point extent() const { return hi - lo; }
  double diameter() const { return extent().norm(); }
  bool contains(const Point& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
};

/// Uniform grid: node (i, j) sits at origin + h * (i, j), 0 <= i < nx, 0 <= j < ny.
struct Grid {
  Point origin = Point::Zero();
  double h = 1.0;
  Index nx = 0;
  Index ny = 0;

  /// Grid whose nodes are integer multiples of h, covering `box` with at
  /// least `margin` cells on every side.
  static Grid covering(const Box& box, double h, int margin = 2);

  /// Grid whose nodes are cell midpoints (k + 1/2) h; the natural node set for
  /// midpoint quadrature.
  static Grid cell_centered(const Box& box, double h, int margin = 2);

  Point node(Index i, Index j) const { return origin + h * Point(double(i), double(j)); }
  Point node(Index k) const { return node(k % nx, k / nx); }
  Index linear(Index i, Index j) const { return i + nx * j; }
  Index size() const { return nx * ny; }
  bool valid(Index i, Index j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }

  /// Index of the node nearest to p, clamped to the grid.
  Eigen::Vector2i nearest(const Point& p) const;

  bool same_as(const Grid& other) const;
};

/// Node values plus the mask of nodes lying strictly inside the domain.
struct ScalarField {
  Grid grid;
  Eigen::ArrayXXd values;  // nx x ny
  Mask inside;             // nx x ny
  std::string quantity;    // what is stored: "distance", "potential", ...

  ScalarField() = default;
  ScalarField(const Grid& g, Mask in, std::string what = {});

  double& operator()(Index i, Index j) { return values(i, j); }
  double operator()(Index i, Index j) const { return values(i, j); }

  /// Bilinear interpolation; falls back to the nearest node when a corner of
  /// the enclosing cell is not flagged in `known`.
  double sample(const Point& p, const Mask& known) const;
  double sample(const Point& p) const { return sample(p, inside); }
};

/// Grid representation of a closed set: a membership flag per node.
struct CompactMask {
  Grid grid;
  Mask member;

  CompactMask() = default;
  explicit CompactMask(const Grid& g) : grid(g), member(Mask::Constant(g.nx, g.ny, false)) {}
  CompactMask(const Grid& g, Mask m) : grid(g), member(std::move(m)) {}

  Index count() const { return member.count(); }
  bool empty() const { return count() == 0; }
};

/// Labelled 4-connected components of a mask. Labels are 0..count-1; -1 off-mask.
struct Components {
  Eigen::ArrayXXi label;
  std::vector<std::vector<Index>> nodes;  // linear node indices per component

  std::size_t count() const { return nodes.size(); }
};

Components connected_components(const Mask& mask);

/// Nodes of `region` reachable from `seeds` through 4-neighbour steps inside `region`.
Mask flood_fill(const Mask& region, const Mask& seeds);

/// Inside nodes having at least one 4-neighbour that is not inside.
Mask boundary_adjacent(const Mask& inside);

/// Members whose four axis neighbours are all members.
Mask grid_interior(const Mask& m);

/// Members with at least one 4-neighbour that is not a member.
Mask mask_boundary(const Mask& m);

/// Exact Euclidean distance (in physical units) from every node to the nearest
/// member node of `m`; +inf everywhere when `m` is empty.
Eigen::ArrayXXd distance_to_mask(const Mask& m, double h);

}  // namespace infbern

#endif  // INFBERN_GRID_HPP

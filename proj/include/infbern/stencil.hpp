// Wide-stencil neighbourhoods on a grid, with cut-cell boundary points.
#ifndef INFBERN_STENCIL_HPP
#define INFBERN_STENCIL_HPP

#include "infbern/geometry.hpp"
#include "infbern/grid.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace infbern {

/// Neighbours within Chebyshev radius `width`, one per coprime offset.
struct StencilConfig {
  int width = 3;
};

/// Width for a refinement study: grows like h^{-1/3} from `base_width` at
/// `base_h`, so the angular resolution improves along with the spacing.
StencilConfig refined_stencil(double h, int base_width = 3, double base_h = 1.0 / 32);

struct Direction {
  int di;
  int dj;
  double length;  // in grid cells
};

/// Offsets (a, b) with max(|a|,|b|) <= width and gcd(|a|,|b|) = 1, symmetric under sign flip.
std::vector<Direction> stencil_directions(int width);

enum class NodeKind : std::uint8_t { outside, fixed, free_regular, free_cut };

/// One stencil point of a node: a grid node (node >= 0) or an off-grid point
/// carrying a prescribed value (node < 0), at Euclidean distance `dist`.
struct StencilEntry {
  Index node;
  double dist;
  double value;
};

/// Dirichlet data for the stencil builder.
struct DirichletData {
  /// Value at boundary points of the domain.
  std::function<double(const Point&)> boundary_value;
  /// Interior nodes held fixed, and their values.
  Mask fixed;
  Eigen::ArrayXXd fixed_values;
  /// Optional exact description of the fixed set: level(x) <= 0 on it. When
  /// present, a ray from a free node to a fixed node is cut where the level
  /// changes sign, and the cut point carries the fixed node's value.
  std::function<double(const Point&)> fixed_level;
};

class DiscreteStencil {
 public:
  Grid grid;
  std::vector<Direction> directions;
  std::vector<Index> offsets;  // linear index offsets of the directions
  std::vector<NodeKind> kind;  // per node
  std::vector<Index> free_nodes;  // lexicographic order

  /// Calls f(value, dist, node) for every stencil point of free node k;
  /// `u` holds the current node values (linear index).
  template <class F>
  void for_each(Index k, const double* u, F&& f) const {
    if (kind[k] == NodeKind::free_regular) {
      for (std::size_t d = 0; d < offsets.size(); ++d) {
        const Index n = k + offsets[d];
        f(u[n], lengths_[d], n);
      }
      return;
    }
    const auto [b, e] = cut_range(k);
    for (auto it = b; it != e; ++it) f(it->node >= 0 ? u[it->node] : it->value, it->dist, it->node);
  }

  /// Minimal and maximal Dirichlet values carried by cut points.
  double min_cut_value() const { return min_cut_; }
  double max_cut_value() const { return max_cut_; }
  bool has_cut_values() const { return min_cut_ <= max_cut_; }

  /// Builds the stencil of a Dirichlet problem on the domain.
  static DiscreteStencil build(const Domain& domain, const Grid& grid, const Mask& inside,
                               const DirichletData& data, StencilConfig config,
                               double min_cut_fraction);

  /// Stencil for a plain field: neighbours restricted to `support`; every
  /// supported node is free.
  static DiscreteStencil on_support(const Grid& grid, const Mask& support, StencilConfig config);

 private:
  using Iter = std::vector<StencilEntry>::const_iterator;
  std::pair<Iter, Iter> cut_range(Index k) const {
    const auto slot = cut_slot_[k];
    return {entries_.begin() + cut_begin_[slot], entries_.begin() + cut_begin_[slot + 1]};
  }

  void init(const Grid& g, StencilConfig config);
  void open_cut(Index k);
  void push(const StencilEntry& e);
  void close_cuts();

  std::vector<double> lengths_;  // physical lengths of the directions
  std::vector<std::uint32_t> cut_slot_;
  std::vector<std::size_t> cut_begin_;
  std::vector<StencilEntry> entries_;
  double min_cut_ = 1.0;
  double max_cut_ = 0.0;
};

}  // namespace infbern

#endif  // INFBERN_STENCIL_HPP

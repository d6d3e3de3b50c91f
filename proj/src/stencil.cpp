#include "infbern/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace infbern {

std::vector<Direction> stencil_directions(int width) {
  if (width < 1) throw std::invalid_argument("stencil width must be >= 1");
  std::vector<Direction> dirs;
  for (int b = -width; b <= width; ++b)
    for (int a = -width; a <= width; ++a) {
      if (a == 0 && b == 0) continue;
      if (std::gcd(std::abs(a), std::abs(b)) != 1) continue;
      dirs.push_back({a, b, std::hypot(double(a), double(b))});
    }
  return dirs;
}

StencilConfig refined_stencil(double h, int base_width, double base_h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const double w = base_width * std::cbrt(base_h / h);
  return {std::max(base_width, int(std::ceil(w - 1e-9)))};
}

void DiscreteStencil::init(const Grid& g, StencilConfig config) {
  grid = g;
  directions = stencil_directions(config.width);
  offsets.clear();
  lengths_.clear();
  for (const auto& d : directions) {
    offsets.push_back(Index(d.di) + g.nx * Index(d.dj));
    lengths_.push_back(d.length * g.h);
  }
  kind.assign(g.size(), NodeKind::outside);
  cut_slot_.assign(g.size(), 0);
  cut_begin_.assign(1, 0);
  entries_.clear();
  free_nodes.clear();
}

void DiscreteStencil::open_cut(Index k) { cut_slot_[k] = std::uint32_t(cut_begin_.size() - 1); }

void DiscreteStencil::push(const StencilEntry& e) {
  entries_.push_back(e);
  if (e.node < 0) {
    min_cut_ = std::min(min_cut_, e.value);
    max_cut_ = std::max(max_cut_, e.value);
  }
}

void DiscreteStencil::close_cuts() { cut_begin_.push_back(entries_.size()); }

DiscreteStencil DiscreteStencil::build(const Domain& domain, const Grid& g, const Mask& inside,
                                       const DirichletData& data, StencilConfig config,
                                       double min_cut_fraction) {
  DiscreteStencil s;
  s.init(g, config);
  s.min_cut_ = std::numeric_limits<double>::infinity();
  s.max_cut_ = -std::numeric_limits<double>::infinity();
  std::vector<StencilEntry> local;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      const Index k = g.linear(i, j);
      if (!inside(i, j)) continue;
      if (data.fixed(i, j)) {
        s.kind[k] = NodeKind::fixed;
        continue;
      }
      s.free_nodes.push_back(k);
      const Point x = g.node(i, j);
      const double level_x = data.fixed_level ? data.fixed_level(x) : 0.0;
      bool regular = true;
      local.clear();
      for (std::size_t d = 0; d < s.directions.size(); ++d) {
        const auto& dir = s.directions[d];
        const Point v = g.h * Point(dir.di, dir.dj);
        const Index ni = i + dir.di, nj = j + dir.dj;
        const bool on_grid = g.valid(ni, nj);
        const bool nb_inside = on_grid && inside(ni, nj);
        const double t_exit = domain.exit_parameter(x, v, 1.0);
        if (!nb_inside || t_exit < 1.0) {
          const double t = std::clamp(t_exit, min_cut_fraction, 1.0);
          local.push_back({-1, t * s.lengths_[d], data.boundary_value(x + t_exit * v)});
          regular = false;
          continue;
        }
        if (data.fixed(ni, nj) && data.fixed_level && level_x > 0.0) {
          const Point y = g.node(ni, nj);
          if (data.fixed_level(y) <= 0.0) {
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
              const double mid = 0.5 * (lo + hi);
              (data.fixed_level(x + mid * v) > 0.0 ? lo : hi) = mid;
            }
            if (hi < 1.0) {
              const double t = std::max(hi, min_cut_fraction);
              local.push_back({-1, t * s.lengths_[d], data.fixed_values(ni, nj)});
              regular = false;
              continue;
            }
          }
        }
        local.push_back({g.linear(ni, nj), s.lengths_[d], 0.0});
      }
      if (regular) {
        s.kind[k] = NodeKind::free_regular;
      } else {
        s.kind[k] = NodeKind::free_cut;
        s.open_cut(k);
        for (const auto& e : local) s.push(e);
        s.close_cuts();
      }
    }
  return s;
}

DiscreteStencil DiscreteStencil::on_support(const Grid& g, const Mask& support,
                                            StencilConfig config) {
  DiscreteStencil s;
  s.init(g, config);
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      if (!support(i, j)) continue;
      const Index k = g.linear(i, j);
      s.free_nodes.push_back(k);
      bool regular = true;
      for (const auto& dir : s.directions) {
        const Index ni = i + dir.di, nj = j + dir.dj;
        if (!g.valid(ni, nj) || !support(ni, nj)) {
          regular = false;
          break;
        }
      }
      if (regular) {
        s.kind[k] = NodeKind::free_regular;
        continue;
      }
      s.kind[k] = NodeKind::free_cut;
      s.open_cut(k);
      for (std::size_t d = 0; d < s.directions.size(); ++d) {
        const Index ni = i + s.directions[d].di, nj = j + s.directions[d].dj;
        if (g.valid(ni, nj) && support(ni, nj)) s.push({g.linear(ni, nj), s.lengths_[d], 0.0});
      }
      s.close_cuts();
    }
  return s;
}

}  // namespace infbern

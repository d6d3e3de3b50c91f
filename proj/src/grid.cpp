#include "infbern/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace infbern {

namespace {

constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};

Grid make_grid(const Box& box, double h, int margin, double shift) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  if (margin < 2) margin = 2;
  Grid g;
  g.h = h;
  const Eigen::Array2d lo = ((box.lo.array() - shift * h) / h).floor() - margin;
  const Eigen::Array2d hi = ((box.hi.array() - shift * h) / h).ceil() + margin;
  g.origin = (lo * h + shift * h).matrix();
  g.nx = Index(hi.x() - lo.x()) + 1;
  g.ny = Index(hi.y() - lo.y()) + 1;
  return g;
}

// Squared distance transform of a sampled 1D function (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& out, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = int(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[k]) {  // k == 0 and new parabola dominates everywhere
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), inf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    out[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

Grid Grid::covering(const Box& box, double h, int margin) { return make_grid(box, h, margin, 0.0); }

Grid Grid::cell_centered(const Box& box, double h, int margin) {
  return make_grid(box, h, margin, 0.5);
}

Eigen::Vector2i Grid::nearest(const Point& p) const {
  const Eigen::Array2d q = ((p - origin) / h).array().round();
  return {int(std::clamp<double>(q.x(), 0, double(nx - 1))),
          int(std::clamp<double>(q.y(), 0, double(ny - 1)))};
}

bool Grid::same_as(const Grid& o) const {
  return nx == o.nx && ny == o.ny && std::abs(h - o.h) <= 1e-12 * h &&
         (origin - o.origin).norm() <= 1e-9 * h;
}

ScalarField::ScalarField(const Grid& g, Mask in, std::string what)
    : grid(g), values(Eigen::ArrayXXd::Zero(g.nx, g.ny)), inside(std::move(in)),
      quantity(std::move(what)) {}

double ScalarField::sample(const Point& p, const Mask& known) const {
  const Eigen::Array2d s = (p - grid.origin).array() / grid.h;
  const Index i = Index(std::floor(s.x()));
  const Index j = Index(std::floor(s.y()));
  const double fx = s.x() - double(i);
  const double fy = s.y() - double(j);
  if (grid.valid(i, j) && grid.valid(i + 1, j + 1) && known(i, j) && known(i + 1, j) &&
      known(i, j + 1) && known(i + 1, j + 1)) {
    return (1 - fx) * (1 - fy) * values(i, j) + fx * (1 - fy) * values(i + 1, j) +
           (1 - fx) * fy * values(i, j + 1) + fx * fy * values(i + 1, j + 1);
  }
  // Nearest known node among the cell corners, else the nearest node outright.
  double best = std::numeric_limits<double>::infinity();
  double val = values(grid.nearest(p).x(), grid.nearest(p).y());
  for (Index a = i; a <= i + 1; ++a)
    for (Index b = j; b <= j + 1; ++b) {
      if (!grid.valid(a, b) || !known(a, b)) continue;
      const double dist = (grid.node(a, b) - p).squaredNorm();
      if (dist < best) {
        best = dist;
        val = values(a, b);
      }
    }
  return val;
}

Components connected_components(const Mask& mask) {
  Components c;
  const Index nx = mask.rows(), ny = mask.cols();
  c.label = Eigen::ArrayXXi::Constant(nx, ny, -1);
  std::vector<Index> stack;
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) {
      if (!mask(i, j) || c.label(i, j) >= 0) continue;
      const int id = int(c.nodes.size());
      c.nodes.emplace_back();
      auto& list = c.nodes.back();
      stack.assign(1, i + nx * j);
      c.label(i, j) = id;
      while (!stack.empty()) {
        const Index k = stack.back();
        stack.pop_back();
        list.push_back(k);
        const Index ki = k % nx, kj = k / nx;
        for (int d = 0; d < 4; ++d) {
          const Index a = ki + kDi[d], b = kj + kDj[d];
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          if (!mask(a, b) || c.label(a, b) >= 0) continue;
          c.label(a, b) = id;
          stack.push_back(a + nx * b);
        }
      }
      std::sort(list.begin(), list.end());
    }
  return c;
}

Mask flood_fill(const Mask& region, const Mask& seeds) {
  const Index nx = region.rows(), ny = region.cols();
  Mask reached = Mask::Constant(nx, ny, false);
  std::deque<Index> queue;
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i)
      if (region(i, j) && seeds(i, j)) {
        reached(i, j) = true;
        queue.push_back(i + nx * j);
      }
  while (!queue.empty()) {
    const Index k = queue.front();
    queue.pop_front();
    const Index ki = k % nx, kj = k / nx;
    for (int d = 0; d < 4; ++d) {
      const Index a = ki + kDi[d], b = kj + kDj[d];
      if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
      if (!region(a, b) || reached(a, b)) continue;
      reached(a, b) = true;
      queue.push_back(a + nx * b);
    }
  }
  return reached;
}

namespace {

template <class Pred>
Mask neighbour_test(const Mask& m, Pred pred) {
  const Index nx = m.rows(), ny = m.cols();
  Mask out = Mask::Constant(nx, ny, false);
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) {
      if (!m(i, j)) continue;
      int members = 0;
      for (int d = 0; d < 4; ++d) {
        const Index a = i + kDi[d], b = j + kDj[d];
        if (a >= 0 && b >= 0 && a < nx && b < ny && m(a, b)) ++members;
      }
      out(i, j) = pred(members);
    }
  return out;
}

}  // namespace

Mask boundary_adjacent(const Mask& inside) {
  return neighbour_test(inside, [](int members) { return members < 4; });
}

Mask grid_interior(const Mask& m) {
  return neighbour_test(m, [](int members) { return members == 4; });
}

Mask mask_boundary(const Mask& m) {
  return neighbour_test(m, [](int members) { return members < 4; });
}

Eigen::ArrayXXd distance_to_mask(const Mask& m, double h) {
  const Index nx = m.rows(), ny = m.cols();
  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::ArrayXXd sq(nx, ny);
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) sq(i, j) = m(i, j) ? 0.0 : inf;

  const Index n = std::max(nx, ny);
  std::vector<double> f, out;
  std::vector<int> v(n + 1);
  std::vector<double> z(n + 2);
  // Columns (along x) first, then rows (along y).
  f.resize(nx);
  out.resize(nx);
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) f[i] = sq(i, j);
    edt_1d(f, out, v, z);
    for (Index i = 0; i < nx; ++i) sq(i, j) = out[i];
  }
  f.resize(ny);
  out.resize(ny);
  for (Index i = 0; i < nx; ++i) {
    for (Index j = 0; j < ny; ++j) f[j] = sq(i, j);
    edt_1d(f, out, v, z);
    for (Index j = 0; j < ny; ++j) sq(i, j) = out[j];
  }
  return sq.sqrt() * h;
}

}  // namespace infbern

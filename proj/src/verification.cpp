#include "infbern/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace infbern {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

std::pair<double, double> range_over(const ScalarField& u, const Mask& region) {
  double lo = kInf, hi = -kInf;
  for (Index j = 0; j < u.grid.ny; ++j)
    for (Index i = 0; i < u.grid.nx; ++i)
      if (region(i, j)) {
        lo = std::min(lo, u(i, j));
        hi = std::max(hi, u(i, j));
      }
  return {lo, hi};
}

std::string count_note(const char* what, long n) {
  std::ostringstream os;
  os << n << ' ' << what;
  return os.str();
}

}  // namespace

VerificationReport verify_cone_comparison(const ScalarField& u, const Mask& region, int trials,
                                          std::uint64_t seed, std::optional<double> tolerance) {
  const Grid& g = u.grid;
  const auto [lo, hi] = range_over(u, region);
  const double range = hi > lo ? hi - lo : 1.0;
  const double tol = tolerance.value_or(5.0 * g.h * range);

  std::vector<Index> nodes;
  double slope = 0.0;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      if (!region(i, j)) continue;
      nodes.push_back(g.linear(i, j));
      if (i + 1 < g.nx && region(i + 1, j)) slope = std::max(slope, std::abs(u(i + 1, j) - u(i, j)) / g.h);
      if (j + 1 < g.ny && region(i, j + 1)) slope = std::max(slope, std::abs(u(i, j + 1) - u(i, j)) / g.h);
    }
  const std::string cite = "comparison with cones from above and below";
  if (nodes.empty()) return VerificationReport::make("cone_comparison", 0.0, tol, {}, cite, "empty region");

  std::mt19937_64 rng(seed);
  const Index max_half = std::max<Index>(2, std::min(g.nx, g.ny) / 8);
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  std::uniform_int_distribution<Index> half(2, max_half);
  std::uniform_real_distribution<double> coin(-2.0 * slope, 2.0 * slope);

  double worst = 0.0;
  std::optional<Point> where;
  long done = 0;
  for (int t = 0; t < trials; ++t) {
    Index i0 = 0, i1 = 0, j0 = 0, j1 = 0;
    bool found = false;
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
      const Index c = nodes[pick(rng)];
      const Index ci = c % g.nx, cj = c / g.nx;
      const Index a = half(rng), b = half(rng);
      i0 = ci - a, i1 = ci + a, j0 = cj - b, j1 = cj + b;
      if (!g.valid(i0, j0) || !g.valid(i1, j1)) continue;
      found = region.block(i0, j0, i1 - i0 + 1, j1 - j0 + 1).all();
    }
    if (!found) continue;
    ++done;
    std::uniform_int_distribution<Index> pi(i0 + 1, i1 - 1), pj(j0 + 1, j1 - 1);
    const Index xi = pi(rng), xj = pj(rng);
    const Point x0 = g.node(xi, xj);
    const double b = coin(rng);
    for (double sign : {1.0, -1.0}) {
      // Smallest a with the cone above sign*u on the box boundary and at x0.
      double a = sign * u(xi, xj);
      for (Index j = j0; j <= j1; ++j)
        for (Index i = i0; i <= i1; ++i) {
          if (i != i0 && i != i1 && j != j0 && j != j1) continue;
          a = std::max(a, sign * u(i, j) - b * (g.node(i, j) - x0).norm());
        }
      for (Index j = j0 + 1; j < j1; ++j)
        for (Index i = i0 + 1; i < i1; ++i) {
          const double excess = sign * u(i, j) - (a + b * (g.node(i, j) - x0).norm());
          if (excess > worst) {
            worst = excess;
            where = g.node(i, j);
          }
        }
    }
  }
  return VerificationReport::make("cone_comparison", worst, tol, where, cite,
                                  count_note("cones tested from above and below", done));
}

VerificationReport verify_cone_comparison(const Potential& p, int trials, std::uint64_t seed) {
  return verify_cone_comparison(p.field, p.free, trials, seed, 5.0 * p.field.grid.h);
}

VerificationReport verify_slope_estimates(const ScalarField& u, const DiscreteStencil& stencil,
                                          const Mask& region, std::optional<double> tolerance,
                                          double radius_cells) {
  const Grid& g = u.grid;
  const auto [lo, hi] = range_over(u, region);
  const double tol = tolerance.value_or(5.0 * g.h * (hi > lo ? hi - lo : 1.0));
  const Eigen::ArrayXXd grad = upwind_gradient(u, stencil);
  const double r = radius_cells * g.h;
  const Index reach = Index(std::ceil(radius_cells)) + 1;
  constexpr int kSamples = 48;

  double worst = 0.0;
  std::optional<Point> where;
  long checked = 0;
  for (Index j = reach; j + reach < g.ny; ++j)
    for (Index i = reach; i + reach < g.nx; ++i) {
      if (!region(i, j) || stencil.kind[g.linear(i, j)] != NodeKind::free_regular) continue;
      bool ok = true;
      for (Index b = -reach; b <= reach && ok; ++b)
        for (Index a = -reach; a <= reach && ok; ++a)
          if (std::hypot(double(a), double(b)) <= radius_cells + 1.5) ok = region(i + a, j + b);
      if (!ok) continue;
      ++checked;
      const Point x = g.node(i, j);
      const double ux = u(i, j);
      double rise = -kInf, fall = -kInf;
      Point top = x;
      for (int s = 0; s < kSamples; ++s) {
        const double th = 2.0 * std::numbers::pi * s / kSamples;
        const Point y = x + r * Point(std::cos(th), std::sin(th));
        const double uy = u.sample(y, region);
        if ((uy - ux) / r > rise) {
          rise = (uy - ux) / r;
          top = y;
        }
        fall = std::max(fall, (ux - uy) / r);
      }
      const auto q = g.nearest(top);
      const double excess =
          std::max({grad(i, j) - rise, grad(i, j) - fall, grad(i, j) - grad(q.x(), q.y())});
      if (excess > worst) {
        worst = excess;
        where = x;
      }
    }
  return VerificationReport::make("slope_estimates", worst, tol, where,
                                  "slope bounds on spheres and increasing slope estimates",
                                  count_note("nodes checked", checked));
}

VerificationReport verify_slope_estimates(const Potential& p) {
  return verify_slope_estimates(p.field, *p.stencil, p.free, 5.0 * p.field.grid.h);
}

VerificationReport verify_harnack(const Potential& p, const Point& x0,
                                  const std::vector<Point>& polyline,
                                  std::optional<double> tolerance) {
  const Grid& g = p.field.grid;
  std::vector<Point> path;
  if (polyline.empty() || (polyline.front() - x0).norm() > 0.0) path.push_back(x0);
  path.insert(path.end(), polyline.begin(), polyline.end());

  double length = 0.0;
  for (std::size_t s = 1; s < path.size(); ++s) length += (path[s] - path[s - 1]).norm();
  double delta = kInf;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      if (!p.K.member(i, j)) continue;
      const Point z = g.node(i, j);
      if (path.size() == 1) delta = std::min(delta, (z - path[0]).norm());
      for (std::size_t s = 1; s < path.size(); ++s)
        delta = std::min(delta, segment_distance(z, path[s - 1], path[s]));
    }
  if (!(delta > 0.0)) throw std::invalid_argument("Harnack path touches the zero set K");

  const Mask all = Mask::Constant(g.nx, g.ny, true);
  const double w = p.field.sample(x0, all);
  const double bound = std::exp(-length / delta);
  std::ostringstream note;
  note << "w(x0)=" << w << " bound=" << bound << " L=" << length << " delta=" << delta;
  return VerificationReport::make("harnack", std::max(0.0, bound - w),
                                  tolerance.value_or(5.0 * g.h), x0,
                                  "Harnack inequality w_K(x0) >= exp(-L/delta)", note.str());
}

VerificationReport verify_affine_on_rays(const Potential& p, const Domain& domain, double tol,
                                         std::optional<double> pair_slack, int max_pairs,
                                         int samples_per_ray) {
  const Grid& g = p.field.grid;
  std::vector<Point> ys;
  for (const auto& piece : domain.boundary()) {
    const auto pts = sample(piece, g.h);
    ys.insert(ys.end(), pts.begin(), pts.end());
  }
  std::vector<Point> zs;
  const Mask rim = mask_boundary(p.K.member);
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i)
      if (rim(i, j)) zs.push_back(g.node(i, j));
  if (ys.empty() || zs.empty()) throw std::invalid_argument("no boundary samples or empty K");

  double dmin = kInf;
  for (const auto& y : ys)
    for (const auto& z : zs) dmin = std::min(dmin, (y - z).norm());
  const double slack = pair_slack.value_or(0.5 * g.h);
  struct Pair {
    double dist;
    std::size_t y, z;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < ys.size(); ++a)
    for (std::size_t b = 0; b < zs.size(); ++b) {
      const double dist = (ys[a] - zs[b]).norm();
      if (dist <= dmin + slack) pairs.push_back({dist, a, b});
    }
  if (pairs.empty()) throw std::invalid_argument("no minimizing boundary/K pair found");

  const std::size_t take = std::min<std::size_t>(pairs.size(), std::size_t(std::max(1, max_pairs)));
  const Mask all = Mask::Constant(g.nx, g.ny, true);
  double worst = 0.0;
  std::optional<Point> where;
  for (std::size_t q = 0; q < take; ++q) {
    const Pair& pr = pairs[q * pairs.size() / take];
    const Point& y = ys[pr.y];
    const Point& z = zs[pr.z];
    for (int s = 1; s <= samples_per_ray; ++s) {
      const double t = double(s) / (samples_per_ray + 1);
      const Point x = z + t * (y - z);
      const double dev = std::abs(p.field.sample(x, all) - t);
      if (dev > worst) {
        worst = dev;
        where = x;
      }
    }
  }
  std::ostringstream note;
  note << take << " of " << pairs.size() << " minimizing pairs, dist(boundary, K)=" << dmin;
  return VerificationReport::make("affine_on_rays", worst, tol, where,
                                  "potential is affine on minimizing boundary-to-K segments",
                                  note.str());
}

double sup_difference(const ScalarField& a, const ScalarField& b) {
  if (!a.grid.same_as(b.grid)) throw std::invalid_argument("fields live on different grids");
  double worst = 0.0;
  for (Index j = 0; j < a.grid.ny; ++j)
    for (Index i = 0; i < a.grid.nx; ++i)
      if (a.inside(i, j) && b.inside(i, j)) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

}  // namespace infbern

#include "infbern/infinity_solver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace infbern {

namespace {

std::string nonconvergence_message(double residual, int sweeps) {
  std::ostringstream os;
  os << "solver did not converge after " << sweeps << " sweeps (residual " << residual << ")";
  return os.str();
}

// Stencil values and distances of one node, gathered into scratch arrays.
struct Gather {
  std::vector<double> v, d;
  std::vector<Index> node;
  int m = 0;

  explicit Gather(std::size_t capacity) : v(capacity), d(capacity), node(capacity) {}

  void load(const DiscreteStencil& s, Index k, const double* u) {
    m = 0;
    s.for_each(k, u, [&](double value, double dist, Index n) {
      v[m] = value;
      d[m] = dist;
      node[m] = n;
      ++m;
    });
  }
};

std::size_t gather_capacity(const DiscreteStencil& s) { return 2 * s.directions.size() + 2; }

double update_residual(const DiscreteStencil& s, const std::vector<double>& u) {
  Gather g(gather_capacity(s));
  double worst = 0.0;
  for (Index k : s.free_nodes) {
    g.load(s, k, u.data());
    const double t = local_solve(g.v.data(), g.d.data(), g.m, u[k]).value;
    worst = std::max(worst, std::abs(t - u[k]));
  }
  return worst;
}

double gauss_seidel(const DiscreteStencil& s, std::vector<double>& u) {
  Gather g(gather_capacity(s));
  double change = 0.0;
  auto visit = [&](Index k) {
    g.load(s, k, u.data());
    const double t = local_solve(g.v.data(), g.d.data(), g.m, u[k]).value;
    change = std::max(change, std::abs(t - u[k]));
    u[k] = t;
  };
  for (Index k : s.free_nodes) visit(k);
  for (auto it = s.free_nodes.rbegin(); it != s.free_nodes.rend(); ++it) visit(*it);
  return change;
}

double jacobi(const DiscreteStencil& s, std::vector<double>& u, std::vector<double>& next,
              int threads) {
  next = u;
  const std::size_t n = s.free_nodes.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  std::vector<double> change(chunks, 0.0);
  std::vector<std::thread> pool;
  for (std::size_t c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c] {
      Gather g(gather_capacity(s));
      for (std::size_t q = c * n / chunks; q < (c + 1) * n / chunks; ++q) {
        const Index k = s.free_nodes[q];
        g.load(s, k, u.data());
        const double t = local_solve(g.v.data(), g.d.data(), g.m, u[k]).value;
        change[c] = std::max(change[c], std::abs(t - u[k]));
        next[k] = t;
      }
    });
  }
  for (auto& t : pool) t.join();
  u.swap(next);
  return *std::max_element(change.begin(), change.end());
}

// One policy step: freeze the active (max, min) pair of every free node and
// solve the resulting linear system exactly. Returns false if the system is
// singular.
bool policy_step(const DiscreteStencil& s, std::vector<double>& u) {
  const Index n = Index(s.free_nodes.size());
  std::vector<Index> idx(u.size(), -1);
  for (Index q = 0; q < n; ++q) idx[s.free_nodes[q]] = q;

  Gather g(gather_capacity(s));
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Index q = 0; q < n; ++q) {
    const Index k = s.free_nodes[q];
    g.load(s, k, u.data());
    const LocalSolve ls = local_solve(g.v.data(), g.d.data(), g.m, u[k]);
    trip.emplace_back(q, q, 1.0);
    if (g.v[ls.up] == g.v[ls.down]) {  // flat neighbourhood: hold the local value
      rhs[q] = ls.value;
      continue;
    }
    const double da = g.d[ls.up], db = g.d[ls.down];
    auto couple = [&](int e, double w) {
      const Index nb = g.node[e];
      if (nb >= 0 && idx[nb] >= 0) {
        trip.emplace_back(q, idx[nb], -w);
      } else {
        rhs[q] += w * g.v[e];
      }
    };
    couple(ls.up, db / (da + db));
    couple(ls.down, da / (da + db));
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) return false;
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) return false;
  for (Index q = 0; q < n; ++q) u[s.free_nodes[q]] = x[q];
  return true;
}

// Damped policy iteration: each policy solution is a Newton target; steps
// back off along the segment towards it until the update residual drops.
int policy_iteration(const DiscreteStencil& s, std::vector<double>& u, double& res, double tol,
                     int max_steps) {
  std::vector<double> target, trial;
  int steps = 0;
  while (steps < max_steps && res > tol) {
    target = u;
    if (!policy_step(s, target)) break;
    ++steps;
    bool improved = false;
    for (double theta = 1.0; theta >= 1.0 / 64; theta *= 0.5) {
      trial = u;
      for (Index k : s.free_nodes) trial[k] += theta * (target[k] - u[k]);
      // Two smoothing passes let trial points past switching policies.
      gauss_seidel(s, trial);
      gauss_seidel(s, trial);
      const double r = update_residual(s, trial);
      if (r < res) {
        u.swap(trial);
        res = r;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return steps;
}

}  // namespace

NonConvergence::NonConvergence(double r, int s)
    : std::runtime_error(nonconvergence_message(r, s)), residual(r), sweeps(s) {}

LocalSolve local_solve(const double* v, const double* d, int m, double start) {
  if (m <= 0) return {start, -1, -1};
  double lo = v[0], hi = v[0];
  for (int i = 1; i < m; ++i) {
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  auto active = [&](double u, int& up, int& down) {
    double smax = -std::numeric_limits<double>::infinity();
    double smin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double s = (v[i] - u) / d[i];
      if (s > smax) {
        smax = s;
        up = i;
      }
      if (s < smin) {
        smin = s;
        down = i;
      }
    }
    return smax + smin;
  };
  auto pair_value = [&](int a, int b) { return (d[b] * v[a] + d[a] * v[b]) / (d[a] + d[b]); };

  int up = 0, down = 0;
  if (lo == hi) {
    active(lo, up, down);
    return {lo, up, down};
  }
  // Newton on the piecewise linear, decreasing slope sum, safeguarded by bisection.
  double a = lo, b = hi;
  double u = std::clamp(start, lo, hi);
  for (int it = 0; it < 60; ++it) {
    const double sum = active(u, up, down);
    if (sum > 0.0) a = std::max(a, u);
    else b = std::min(b, u);
    const double next = pair_value(up, down);
    int up2 = 0, down2 = 0;
    active(next, up2, down2);
    if ((up2 == up && down2 == down) || next == u) return {next, up, down};
    u = (next > a && next < b) ? next : 0.5 * (a + b);
  }
  // Exhaustive fallback: the solution comes from the pair maximizing
  // (v_i - v_j) / (d_i + d_j).
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double s = (v[i] - v[j]) / (d[i] + d[j]);
      if (s > best) {
        best = s;
        up = i;
        down = j;
      }
    }
  return {pair_value(up, down), up, down};
}

DirichletSolution solve_dirichlet(const Domain& domain, const DirichletProblem& problem,
                                  const SolveOptions& opts) {
  if (!(opts.tol_residual > 0.0)) throw std::invalid_argument("tol_residual must be positive");
  const Grid& grid = problem.grid;
  const Mask inside = inside_mask(domain, grid);
  DirichletData data{problem.boundary_value, problem.fixed, problem.fixed_values,
                     problem.fixed_level};
  auto stencil = std::make_shared<DiscreteStencil>(
      DiscreteStencil::build(domain, grid, inside, data, opts.stencil, opts.min_cut_fraction));
  const DiscreteStencil& s = *stencil;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (s.has_cut_values()) {
    lo = s.min_cut_value();
    hi = s.max_cut_value();
  }
  for (Index j = 0; j < grid.ny; ++j)
    for (Index i = 0; i < grid.nx; ++i)
      if (inside(i, j) && problem.fixed(i, j)) {
        lo = std::min(lo, problem.fixed_values(i, j));
        hi = std::max(hi, problem.fixed_values(i, j));
      }
  if (!(lo <= hi)) lo = hi = 0.0;
  const double range = hi - lo;
  const double tol = opts.tol_residual * (range > 0.0 ? range : 1.0);

  std::vector<double> u(grid.size());
  for (Index j = 0; j < grid.ny; ++j)
    for (Index i = 0; i < grid.nx; ++i) {
      const Index k = grid.linear(i, j);
      switch (s.kind[k]) {
        case NodeKind::outside:
          u[k] = problem.boundary_value(grid.node(i, j));
          break;
        case NodeKind::fixed:
          u[k] = problem.fixed_values(i, j);
          break;
        default:
          u[k] = problem.initial ? std::clamp((*problem.initial)(i, j), lo, hi) : 0.5 * (lo + hi);
      }
    }

  const int threads = opts.threads > 0 ? opts.threads
                                       : std::max(1, int(std::thread::hardware_concurrency()));
  std::vector<double> scratch;
  auto iterate = [&] {
    return opts.mode == SolveMode::parallel_jacobi ? jacobi(s, u, scratch, threads)
                                                   : gauss_seidel(s, u);
  };

  int sweeps = 0, newton_steps = 0;
  double res = update_residual(s, u);
  bool converged = s.free_nodes.empty();
  while (!converged) {
    if (opts.newton && res > tol) newton_steps += policy_iteration(s, u, res, tol, 50);
    const int batch = opts.newton ? 10 : 50;
    for (int t = 0; t < batch && sweeps < opts.max_sweeps; ++t) {
      const double change = iterate();
      ++sweeps;
      if (change <= tol) {
        res = update_residual(s, u);
        if (res <= tol) {
          converged = true;
          break;
        }
      }
    }
    if (converged) break;
    res = update_residual(s, u);
    if (sweeps >= opts.max_sweeps) throw NonConvergence(res, sweeps);
  }

  DirichletSolution out;
  out.field = ScalarField(grid, inside, "solution");
  out.free = Mask::Constant(grid.nx, grid.ny, false);
  for (Index j = 0; j < grid.ny; ++j)
    for (Index i = 0; i < grid.nx; ++i) {
      const Index k = grid.linear(i, j);
      out.field(i, j) = u[k];
      out.free(i, j) = s.kind[k] == NodeKind::free_regular || s.kind[k] == NodeKind::free_cut;
    }
  out.stencil = stencil;
  out.residual = update_residual(s, u);
  out.tolerance = tol;
  out.data_min = lo;
  out.data_max = hi;
  out.sweeps_used = sweeps;
  out.newton_steps = newton_steps;
  return out;
}

Potential solve_potential(const Domain& domain, const CompactMask& K, const Grid& grid,
                          const SolveOptions& opts, std::function<double(const Point&)> level) {
  if (!K.grid.same_as(grid)) throw std::invalid_argument("zero set lives on a different grid");
  if (K.empty()) throw std::invalid_argument("zero set K is empty");
  const Mask inside = inside_mask(domain, grid);
  if ((K.member && !inside).any()) throw std::invalid_argument("zero set K is not inside the domain");

  const Mask region = inside && !K.member;
  const Mask reached = flood_fill(region, boundary_adjacent(inside));
  const Mask enclosed = region && !reached;

  DirichletProblem prob;
  prob.grid = grid;
  prob.boundary_value = [](const Point&) { return 1.0; };
  prob.fixed = K.member || enclosed;
  prob.fixed_values = Eigen::ArrayXXd::Zero(grid.nx, grid.ny);
  prob.fixed_level = std::move(level);

  const Eigen::ArrayXXd dK = distance_to_mask(K.member, grid.h);
  Eigen::ArrayXXd init = Eigen::ArrayXXd::Zero(grid.nx, grid.ny);
  for (Index j = 0; j < grid.ny; ++j)
    for (Index i = 0; i < grid.nx; ++i) {
      if (!region(i, j)) continue;
      const double d = domain.distance(grid.node(i, j));
      init(i, j) = std::clamp(dK(i, j) / (dK(i, j) + d), 0.0, 1.0);
    }
  prob.initial = std::move(init);

  DirichletSolution sol = solve_dirichlet(domain, prob, opts);
  Potential p;
  p.field = std::move(sol.field);
  p.field.quantity = "potential";
  p.K = K;
  p.free = std::move(sol.free);
  p.enclosed = enclosed;
  p.stencil = std::move(sol.stencil);
  p.residual = sol.residual;
  p.tolerance = sol.tolerance;
  p.sweeps_used = sol.sweeps_used;
  p.newton_steps = sol.newton_steps;
  return p;
}

double residual(const ScalarField& u, const DiscreteStencil& s) {
  const double* vals = u.values.data();
  double worst = 0.0;
  for (Index k : s.free_nodes) {
    double smax = -std::numeric_limits<double>::infinity();
    double smin = std::numeric_limits<double>::infinity();
    s.for_each(k, vals, [&](double v, double d, Index) {
      const double sl = (v - vals[k]) / d;
      smax = std::max(smax, sl);
      smin = std::min(smin, sl);
    });
    if (smax >= smin) worst = std::max(worst, std::abs(smax + smin));
  }
  return worst;
}

double residual(const Potential& p) { return residual(p.field, *p.stencil); }

Eigen::ArrayXXd upwind_gradient(const ScalarField& u, const DiscreteStencil& s) {
  Eigen::ArrayXXd g = Eigen::ArrayXXd::Zero(u.grid.nx, u.grid.ny);
  const double* vals = u.values.data();
  double* out = g.data();
  for (Index k : s.free_nodes) {
    double best = 0.0;
    s.for_each(k, vals, [&](double v, double d, Index) {
      best = std::max(best, (vals[k] - v) / d);
    });
    out[k] = best;
  }
  return g;
}

std::shared_ptr<const DiscreteStencil> support_stencil(const ScalarField& u, StencilConfig config) {
  return std::make_shared<DiscreteStencil>(DiscreteStencil::on_support(u.grid, u.inside, config));
}

}  // namespace infbern

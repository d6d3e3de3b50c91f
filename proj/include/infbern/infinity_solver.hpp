// Dirichlet problems for the infinity Laplacian on grid domains: the
// wide-stencil mid-slope scheme, infinity-harmonic potentials of compact sets,
// and the discrete slope quantities used by the verifications.
#ifndef INFBERN_INFINITY_SOLVER_HPP
#define INFBERN_INFINITY_SOLVER_HPP

#include "infbern/geometry.hpp"
#include "infbern/grid.hpp"
#include "infbern/stencil.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>

namespace infbern {

enum class SolveMode { deterministic_serial, parallel_jacobi };

struct SolveOptions {
  /// Convergence threshold, relative to the range of the Dirichlet data.
  double tol_residual = 1e-8;
  int max_sweeps = 20000;
  SolveMode mode = SolveMode::deterministic_serial;
  StencilConfig stencil;
  /// Policy (Newton) steps on the frozen max/min pairs between sweeps.
  bool newton = true;
  /// Cut points closer than this fraction of the stencil step are moved out to it.
  double min_cut_fraction = 1e-3;
  /// Worker threads for parallel_jacobi; 0 picks the hardware count.
  int threads = 0;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(double residual, int sweeps);
  double residual;
  int sweeps;
};

struct DirichletProblem {
  Grid grid;
  std::function<double(const Point&)> boundary_value;
  /// Interior nodes held at fixed_values.
  Mask fixed;
  Eigen::ArrayXXd fixed_values;
  /// Optional: level(x) <= 0 exactly on the fixed set (see DirichletData).
  std::function<double(const Point&)> fixed_level;
  /// Optional starting values; missing entries default to the data mean.
  std::optional<Eigen::ArrayXXd> initial;
};

struct DirichletSolution {
  ScalarField field;  // outside nodes carry boundary_value at the node
  Mask free;
  std::shared_ptr<const DiscreteStencil> stencil;
  double residual = 0.0;  // max |update(x) - u(x)| over free nodes
  double tolerance = 0.0;  // absolute threshold used for convergence
  double data_min = 0.0;
  double data_max = 0.0;
  int sweeps_used = 0;
  int newton_steps = 0;
};

/// Solves the scheme to tolerance; throws NonConvergence after max_sweeps.
DirichletSolution solve_dirichlet(const Domain& domain, const DirichletProblem& problem,
                                  const SolveOptions& opts);

/// Potential w_K: zero on K, one on the boundary, infinity-harmonic in between.
struct Potential {
  ScalarField field;
  CompactMask K;
  Mask free;
  /// Free nodes that cannot reach the boundary without crossing K; set to zero.
  Mask enclosed;
  std::shared_ptr<const DiscreteStencil> stencil;
  double residual = 0.0;
  double tolerance = 0.0;
  int sweeps_used = 0;
  int newton_steps = 0;
};

/// `level`, when given, describes K exactly (level <= 0 on K) and places the
/// cut points on its boundary; otherwise the K nodes themselves are used.
/// Throws std::invalid_argument if K is empty or not inside the domain.
Potential solve_potential(const Domain& domain, const CompactMask& K, const Grid& grid,
                          const SolveOptions& opts,
                          std::function<double(const Point&)> level = {});

/// Exact solution of max-slope + min-slope = 0 over the values v at distances d.
/// Returns the value and the indices of the active (max, min) pair.
struct LocalSolve {
  double value;
  int up;
  int down;
};
LocalSolve local_solve(const double* v, const double* d, int m, double start);

/// max over free nodes of |max-slope + min-slope| on the stencil.
double residual(const ScalarField& u, const DiscreteStencil& stencil);
double residual(const Potential& p);

/// Largest one-sided slope max_y (u(x) - u(y))^+ / |x - y| over the stencil;
/// zero at nodes that are not free.
Eigen::ArrayXXd upwind_gradient(const ScalarField& u, const DiscreteStencil& stencil);

/// Stencil of a field over its own inside mask (no cut points).
std::shared_ptr<const DiscreteStencil> support_stencil(const ScalarField& u,
                                                       StencilConfig config = {});

}  // namespace infbern

#endif  // INFBERN_INFINITY_SOLVER_HPP

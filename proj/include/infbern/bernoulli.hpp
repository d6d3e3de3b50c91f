// The interior Bernoulli problem for the infinity Laplacian: construction of
// solutions from zero sets, their verification, the characterizing family of
// zero sets, and the multiplicity scenarios.
//
// The free-boundary conditions themselves have no pointwise grid analogue;
// solutions are verified through their consequences (gradient bound,
// free-boundary location, sandwich bounds, affinity along rays).
#ifndef INFBERN_BERNOULLI_HPP
#define INFBERN_BERNOULLI_HPP

#include "infbern/infinity_solver.hpp"
#include "infbern/report.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace infbern {

/// Thresholds of a solution on spacing h.
struct BernoulliTolerances {
  double zero;   // u <= zero counts as u = 0; 10 * tol_residual
  double grad;   // 5 h lambda, likewise fb, sand, eq
  double fb;
  double sand;
  double eq;
  double ray;    // 2h, membership of {d >= 1/lambda}

  static BernoulliTolerances make(double h, double lambda, double tol_residual);
};

enum class SolutionKind { trivial, nontrivial };
const char* to_string(SolutionKind k);

struct BernoulliSolution {
  double lambda = 0.0;
  Potential potential;
  CompactMask zero_set;
  std::vector<Index> free_boundary;  // linear node indices
  SolutionKind kind = SolutionKind::trivial;
  BernoulliTolerances tol{};
  std::vector<VerificationReport> reports;  // checks run while constructing

  const ScalarField& u() const { return potential.field; }
};

/// Geometry shared by the operations on one domain and grid.
struct BernoulliSetup {
  Domain domain;
  Grid grid;
  ScalarField d;
  Inradius inradius;

  BernoulliSetup(Domain dom, const Grid& g);
  /// Grid covering the domain at spacing h.
  BernoulliSetup(Domain dom, double h);
};

/// Evidence that no non-constant solution exists: any solution would need
/// sup |grad u| >= 1/R while the gradient bound caps it at lambda < 1/R.
struct NonexistenceCertificate {
  double lambda;
  double critical;     // 1/R from the measured inradius
  double critical_lo;  // 1/(R + h): the true critical value lies in [critical_lo, critical]
  bool certain;        // lambda < critical_lo
  std::string statement;
};
nlohmann::json to_json(const NonexistenceCertificate& c);

/// Thrown by solve_interior_bernoulli when lambda <= 1/R.
class BernoulliRefusal : public std::runtime_error {
 public:
  explicit BernoulliRefusal(NonexistenceCertificate c, const std::string& why);
  NonexistenceCertificate certificate;
};

/// Thrown when a zero set violates the conditions of an operation; `condition`
/// names the failing one ("i", "ii", "iii", "empty-interior", ...).
class ZeroSetRejected : public std::invalid_argument {
 public:
  ZeroSetRejected(std::string condition, const std::string& what);
  std::string condition;
};

/// The potential of the closed parallel set at distance 1/lambda.
BernoulliSolution solve_interior_bernoulli(const BernoulliSetup& s, double lambda,
                                           const SolveOptions& opts);

/// Wraps a potential as a solution candidate: zero set, free boundary, kind.
BernoulliSolution make_solution(Potential p, double lambda, double tol_residual);

VerificationReport verify_gradient_bound(const BernoulliSolution& sol);
/// Throws std::invalid_argument if the free boundary is empty.
VerificationReport verify_fb_location(const BernoulliSolution& sol, const ScalarField& d);
/// 0 <= u <= 1 on inside nodes.
VerificationReport verify_bounds(const BernoulliSolution& sol);

struct SandwichResult {
  VerificationReport inequalities;  // both bounds on the closure of D
  VerificationReport equalities;    // both bounds tight on the ray set
  double max_slack_off_rays;        // largest gap between the bounds off the ray set
  std::optional<Point> slack_location;
  Index ray_nodes;
};
/// 1 - lambda d <= u <= lambda dist(., {d = 1/lambda}) on {d <= 1/lambda}.
SandwichResult verify_sandwich(const BernoulliSolution& sol, const ScalarField& d);

/// Applicable when lambda < 1/R; throws std::invalid_argument otherwise.
NonexistenceCertificate check_nonexistence(const BernoulliSetup& s, double lambda);

/// A solution whose zero set K has empty grid interior. Throws
/// ZeroSetRejected naming the failing condition.
BernoulliSolution make_trivial_solution(const BernoulliSetup& s, double lambda,
                                        const CompactMask& K, const SolveOptions& opts);

struct KLambdaMembership {
  bool cond_i = false;    // K inside {d >= 1/lambda}
  bool cond_ii = false;   // interior components are components of the open parallel set
  bool cond_iii = false;  // every complement node reaches the boundary
  std::vector<Index> violations_i, violations_ii, violations_iii;

  bool member() const { return cond_i && cond_ii && cond_iii; }
};
KLambdaMembership k_lambda_membership(const BernoulliSetup& s, double lambda, const CompactMask& K);

/// Solves w_K for a member K and verifies gradient bound, free-boundary
/// location and {w_K = 0} = K. `level` is forwarded to solve_potential.
/// Throws ZeroSetRejected if K is not a member.
BernoulliSolution characterize(const BernoulliSetup& s, double lambda, const CompactMask& K,
                               const SolveOptions& opts,
                               std::function<double(const Point&)> level = {});

struct NamedSolution {
  std::string label;
  BernoulliSolution solution;
};

struct ScenarioResult {
  std::string name;
  double lambda = 0.0;
  std::vector<NamedSolution> solutions;
  std::vector<VerificationReport> reports;
  nlohmann::json diagnostics;

  bool pass() const { return all_pass(reports); }
};

/// Scenarios: "nonconn", "nonreg", "square", "ball". Throws
/// std::invalid_argument for an unknown name.
ScenarioResult scenario(const std::string& name, double lambda, double h,
                        const SolveOptions& opts);

/// Closure of the component of the open parallel set {d > r} containing `seed`.
CompactMask parallel_component_closure(const BernoulliSetup& s, double r, const Point& seed);

/// Nodes nearest to points spaced along [p, q], keeping every other one.
CompactMask alternating_segment_nodes(const Grid& g, const Point& p, const Point& q);

/// Fraction of nodes in the convex hull of {u <= t} that lie outside it.
double sublevel_convexity_defect(const ScalarField& u, double t);

}  // namespace infbern

#endif  // INFBERN_BERNOULLI_HPP

#include "infbern/bernoulli.hpp"

#include "infbern/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace infbern {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

Mask positive_free(const BernoulliSolution& sol) {
  return sol.potential.free && (sol.u().values > sol.tol.zero);
}

// Level function of the parallel set {d >= r}.
std::function<double(const Point&)> parallel_level(const Domain* dom, double r) {
  return [dom, r](const Point& x) { return r - dom->distance(x); };
}

std::vector<VerificationReport> core_battery(const BernoulliSolution& sol, const ScalarField& d) {
  return {verify_gradient_bound(sol), verify_fb_location(sol, d), verify_bounds(sol)};
}

VerificationReport zero_set_identity(const BernoulliSolution& sol) {
  const Grid& g = sol.u().grid;
  const Eigen::ArrayXXd to_k = distance_to_mask(sol.potential.K.member, g.h);
  double worst = 0.0;
  std::optional<Point> where;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i)
      if (sol.zero_set.member(i, j) && to_k(i, j) > worst) {
        worst = to_k(i, j);
        where = g.node(i, j);
      }
  return VerificationReport::make("zero_set_identity", worst, g.h, where,
                                  "{w_K = 0} coincides with K",
                                  "distance of zero nodes to K");
}

VerificationReport membership_report(const KLambdaMembership& m, const std::string& label) {
  const int failed = int(!m.cond_i) + int(!m.cond_ii) + int(!m.cond_iii);
  return VerificationReport::make(
      label, failed, 0.0, {}, "zero set belongs to the characterizing family K_lambda",
      cat("cond_i=", m.cond_i, " cond_ii=", m.cond_ii, " cond_iii=", m.cond_iii));
}

// Bounds of the convex hull of points, counter-clockwise.
std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

BernoulliTolerances BernoulliTolerances::make(double h, double lambda, double tol_residual) {
  const double t = 5.0 * h * lambda;
  return {10.0 * tol_residual, t, t, t, t, 2.0 * h};
}

const char* to_string(SolutionKind k) { return k == SolutionKind::trivial ? "trivial" : "nontrivial"; }

BernoulliSetup::BernoulliSetup(Domain dom, const Grid& g)
    : domain(std::move(dom)), grid(g), d(distance_field(domain, grid)),
      inradius(::infbern::inradius(d)) {}

BernoulliSetup::BernoulliSetup(Domain dom, double h)
    : BernoulliSetup(dom, Grid::covering(dom.bounding_box(), h)) {}

nlohmann::json to_json(const NonexistenceCertificate& c) {
  return {{"lambda", c.lambda},
          {"critical", c.critical},
          {"critical_lower", c.critical_lo},
          {"certain", c.certain},
          {"statement", c.statement}};
}

BernoulliRefusal::BernoulliRefusal(NonexistenceCertificate c, const std::string& why)
    : std::runtime_error(why), certificate(std::move(c)) {}

ZeroSetRejected::ZeroSetRejected(std::string cond, const std::string& what)
    : std::invalid_argument(what), condition(std::move(cond)) {}

namespace {

NonexistenceCertificate certificate_for(const BernoulliSetup& s, double lambda) {
  const double R = s.inradius.value;
  NonexistenceCertificate c;
  c.lambda = lambda;
  c.critical = 1.0 / R;
  c.critical_lo = 1.0 / (R + s.inradius.uncertainty);
  c.certain = lambda < c.critical_lo;
  c.statement = cat("a non-constant solution needs sup|grad u| >= 1/R = ", c.critical,
                    " but the gradient bound gives sup|grad u| <= lambda = ", lambda);
  return c;
}

}  // namespace

BernoulliSolution solve_interior_bernoulli(const BernoulliSetup& s, double lambda,
                                           const SolveOptions& opts) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (lambda * s.inradius.value <= 1.0) {
    NonexistenceCertificate c = certificate_for(s, lambda);
    const bool equal = std::abs(lambda * s.inradius.value - 1.0) <= 1e-12;
    throw BernoulliRefusal(
        c, equal ? cat("lambda = 1/R = ", c.critical,
                       ": only trivial solutions exist (zero set on the high ridge)")
                 : cat("lambda = ", lambda, " <= 1/R = ", c.critical,
                       ": no non-constant solution exists"));
  }
  const double r = 1.0 / lambda;
  const CompactMask K = parallel_closure_mask(s.d, r, s.domain.tau_geom());
  Potential p = solve_potential(s.domain, K, s.grid, opts, parallel_level(&s.domain, r));
  return make_solution(std::move(p), lambda, opts.tol_residual);
}

BernoulliSolution make_solution(Potential p, double lambda, double tol_residual) {
  BernoulliSolution sol;
  sol.lambda = lambda;
  sol.tol = BernoulliTolerances::make(p.field.grid.h, lambda, tol_residual);
  const Grid& g = p.field.grid;
  sol.zero_set = CompactMask(g, p.field.inside && (p.field.values <= sol.tol.zero));
  const Mask& z = sol.zero_set.member;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      if (!z(i, j)) continue;
      const Index nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
      for (const auto& n : nb)
        if (g.valid(n[0], n[1]) && p.field.inside(n[0], n[1]) && !z(n[0], n[1])) {
          sol.free_boundary.push_back(g.linear(i, j));
          break;
        }
    }
  sol.kind = grid_interior(z).any() ? SolutionKind::nontrivial : SolutionKind::trivial;
  sol.potential = std::move(p);
  return sol;
}

VerificationReport verify_gradient_bound(const BernoulliSolution& sol) {
  const Eigen::ArrayXXd grad = upwind_gradient(sol.u(), *sol.potential.stencil);
  const Mask pos = positive_free(sol);
  const Grid& g = sol.u().grid;
  double top = 0.0;
  std::optional<Point> where;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i)
      if (pos(i, j) && grad(i, j) > top) {
        top = grad(i, j);
        where = g.node(i, j);
      }
  return VerificationReport::make("gradient_bound", std::max(0.0, top - sol.lambda), sol.tol.grad,
                                  where, "|grad u| <= lambda on {u > 0}",
                                  cat("max upwind gradient ", top));
}

VerificationReport verify_fb_location(const BernoulliSolution& sol, const ScalarField& d) {
  if (sol.free_boundary.empty()) throw std::invalid_argument("free boundary is empty");
  const Grid& g = sol.u().grid;
  double lo = kInf;
  std::optional<Point> where;
  for (Index k : sol.free_boundary) {
    const double dk = d.values(k % g.nx, k / g.nx);
    if (dk < lo) {
      lo = dk;
      where = g.node(k);
    }
  }
  const double r = 1.0 / sol.lambda;
  double worst = std::max(0.0, r - lo);
  if (sol.kind == SolutionKind::nontrivial) worst = std::max(worst, lo - r);
  return VerificationReport::make(
      "free_boundary_location", worst, sol.tol.fb, where,
      sol.kind == SolutionKind::nontrivial ? "dist(F(u), boundary) = 1/lambda"
                                           : "dist(F(u), boundary) >= 1/lambda",
      cat("min distance of free boundary nodes ", lo, ", 1/lambda ", r));
}

VerificationReport verify_bounds(const BernoulliSolution& sol) {
  const auto& u = sol.u();
  double lo = kInf, hi = -kInf;
  for (Index j = 0; j < u.grid.ny; ++j)
    for (Index i = 0; i < u.grid.nx; ++i)
      if (u.inside(i, j)) {
        lo = std::min(lo, u(i, j));
        hi = std::max(hi, u(i, j));
      }
  return VerificationReport::make("bounds", std::max({0.0, -lo, hi - 1.0}), sol.tol.zero, {},
                                  "0 <= u <= 1", cat("min ", lo, " max ", hi));
}

SandwichResult verify_sandwich(const BernoulliSolution& sol, const ScalarField& d) {
  const double lambda = sol.lambda, r = 1.0 / lambda;
  const Grid& g = d.grid;
  const Mask closure = parallel_closure_mask(d, r, 1e-9 * r).member;
  const ScalarField ld = level_set_distance(d, r, &closure);
  const CompactMask hat = hat_d_mask(d, ld, r, 2.0 * g.h);
  const auto& u = sol.u();

  double ineq = 0.0, eq = 0.0, slack = 0.0;
  std::optional<Point> ineq_at, eq_at, slack_at;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      if (!d.inside(i, j) || d(i, j) > r) continue;
      const double lower = 1.0 - lambda * d(i, j);
      const double upper = lambda * ld(i, j);
      const double v = u(i, j);
      const double bad = std::max(lower - v, v - upper);
      if (bad > ineq) {
        ineq = bad;
        ineq_at = g.node(i, j);
      }
      const double gap = std::max(std::abs(v - lower), std::abs(v - upper));
      if (hat.member(i, j)) {
        if (gap > eq) {
          eq = gap;
          eq_at = g.node(i, j);
        }
      } else if (d(i, j) < r && gap > slack) {
        slack = gap;
        slack_at = g.node(i, j);
      }
    }
  SandwichResult res{
      VerificationReport::make("sandwich_inequalities", ineq, sol.tol.sand, ineq_at,
                               "1 - lambda d <= u <= lambda dist(x, boundary of the parallel set)"),
      VerificationReport::make("sandwich_equalities", eq, sol.tol.sand, eq_at,
                               "both sandwich bounds are equalities on the ray set",
                               cat(hat.count(), " ray-set nodes")),
      slack, slack_at, hat.count()};
  return res;
}

NonexistenceCertificate check_nonexistence(const BernoulliSetup& s, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(lambda * s.inradius.value < 1.0))
    throw std::invalid_argument(cat("certificate needs lambda < 1/R = ", 1.0 / s.inradius.value));
  return certificate_for(s, lambda);
}

BernoulliSolution make_trivial_solution(const BernoulliSetup& s, double lambda,
                                        const CompactMask& K, const SolveOptions& opts) {
  if (K.empty()) throw ZeroSetRejected("nonempty", "zero set K is empty");
  const KLambdaMembership m = k_lambda_membership(s, lambda, K);
  if (!m.cond_i)
    throw ZeroSetRejected("i", cat(m.violations_i.size(),
                                   " nodes of K lie closer than 1/lambda to the boundary"));
  if (grid_interior(K.member).any())
    throw ZeroSetRejected("empty-interior", "K has nonempty grid interior");
  if (!m.cond_iii)
    throw ZeroSetRejected("iii", cat(m.violations_iii.size(),
                                     " complement nodes cannot reach the boundary"));
  Potential p = solve_potential(s.domain, K, s.grid, opts);
  BernoulliSolution sol = make_solution(std::move(p), lambda, opts.tol_residual);
  sol.kind = SolutionKind::trivial;
  sol.reports = core_battery(sol, s.d);
  return sol;
}

KLambdaMembership k_lambda_membership(const BernoulliSetup& s, double lambda,
                                      const CompactMask& K) {
  const Grid& g = s.grid;
  const double r = 1.0 / lambda;
  const double tau_ray = 2.0 * g.h;
  KLambdaMembership m;

  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i)
      if (K.member(i, j) && (!s.d.inside(i, j) || s.d(i, j) < r - tau_ray))
        m.violations_i.push_back(g.linear(i, j));
  m.cond_i = m.violations_i.empty();

  const Components inner = connected_components(grid_interior(K.member));
  const Mask open = s.d.inside && (s.d.values > r);
  const Components outer = connected_components(open);
  const double shell = 3.0 * g.h;
  for (const auto& comp : inner.nodes) {
    std::vector<Index> hits(outer.count(), 0);
    for (Index k : comp) {
      const int l = outer.label(k % g.nx, k / g.nx);
      if (l >= 0) ++hits[l];
    }
    const auto best = std::max_element(hits.begin(), hits.end());
    if (best == hits.end() || *best == 0) {
      m.violations_ii.insert(m.violations_ii.end(), comp.begin(), comp.end());
      continue;
    }
    const int label = int(best - hits.begin());
    Mask in_comp = Mask::Constant(g.nx, g.ny, false);
    for (Index k : comp) in_comp(k % g.nx, k / g.nx) = true;
    for (Index k : comp)
      if (outer.label(k % g.nx, k / g.nx) != label &&
          std::abs(s.d.values(k % g.nx, k / g.nx) - r) > shell)
        m.violations_ii.push_back(k);
    for (Index k : outer.nodes[label])
      if (!in_comp(k % g.nx, k / g.nx) && std::abs(s.d.values(k % g.nx, k / g.nx) - r) > shell)
        m.violations_ii.push_back(k);
  }
  m.cond_ii = m.violations_ii.empty();

  const Mask inside = s.d.inside;
  const Mask region = inside && !K.member;
  const Mask reached = flood_fill(region, boundary_adjacent(inside));
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i)
      if (region(i, j) && !reached(i, j)) m.violations_iii.push_back(g.linear(i, j));
  m.cond_iii = m.violations_iii.empty();
  return m;
}

BernoulliSolution characterize(const BernoulliSetup& s, double lambda, const CompactMask& K,
                               const SolveOptions& opts, std::function<double(const Point&)> level) {
  if (K.empty()) throw ZeroSetRejected("nonempty", "zero set K is empty");
  const KLambdaMembership m = k_lambda_membership(s, lambda, K);
  if (!m.member()) {
    std::string failed;
    if (!m.cond_i) failed += "i ";
    if (!m.cond_ii) failed += "ii ";
    if (!m.cond_iii) failed += "iii ";
    failed.pop_back();
    throw ZeroSetRejected(failed, "K is not in the characterizing family; failing condition(s): " + failed);
  }
  Potential p = solve_potential(s.domain, K, s.grid, opts, std::move(level));
  BernoulliSolution sol = make_solution(std::move(p), lambda, opts.tol_residual);
  sol.reports = core_battery(sol, s.d);
  sol.reports.push_back(zero_set_identity(sol));
  return sol;
}

CompactMask parallel_component_closure(const BernoulliSetup& s, double r, const Point& seed) {
  const Grid& g = s.grid;
  const Mask open = s.d.inside && (s.d.values > r);
  const Components comps = connected_components(open);
  const auto n = g.nearest(seed);
  const int label = comps.label(n.x(), n.y());
  if (label < 0) throw std::invalid_argument("seed is not in the open parallel set");
  Mask comp = Mask::Constant(g.nx, g.ny, false);
  for (Index k : comps.nodes[label]) comp(k % g.nx, k / g.nx) = true;
  const CompactMask closure = parallel_closure_mask(s.d, r, s.domain.tau_geom());
  return CompactMask(g, closure.member && (distance_to_mask(comp, g.h) <= 3.0 * g.h));
}

CompactMask alternating_segment_nodes(const Grid& g, const Point& p, const Point& q) {
  const int steps = std::max(1, int(std::ceil((q - p).norm() / g.h)));
  std::vector<Eigen::Vector2i> nodes;
  for (int k = 0; k <= steps; ++k) {
    const auto n = g.nearest(p + (double(k) / steps) * (q - p));
    if (nodes.empty() || nodes.back() != n) nodes.push_back(n);
  }
  CompactMask m(g);
  for (std::size_t k = 0; k < nodes.size(); k += 2) m.member(nodes[k].x(), nodes[k].y()) = true;
  return m;
}

double sublevel_convexity_defect(const ScalarField& u, double t) {
  const Grid& g = u.grid;
  std::vector<Point> pts;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i)
      if (u.inside(i, j) && u(i, j) <= t) pts.push_back(g.node(i, j));
  const std::vector<Point> hull = convex_hull(pts);
  if (hull.size() < 3) return 0.0;
  const double eps = 1e-9 * g.h;
  Index in_hull = 0, outside_set = 0;
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      const Point x = g.node(i, j);
      bool in = true;
      for (std::size_t e = 0; e < hull.size() && in; ++e) {
        const Point& a = hull[e];
        const Point& b = hull[(e + 1) % hull.size()];
        in = (b - a).x() * (x - a).y() - (b - a).y() * (x - a).x() >= -eps;
      }
      if (!in) continue;
      ++in_hull;
      if (!(u.inside(i, j) && u(i, j) <= t)) ++outside_set;
    }
  return in_hull ? double(outside_set) / double(in_hull) : 0.0;
}

namespace {

void add_solution(ScenarioResult& out, const std::string& label, BernoulliSolution sol) {
  for (auto r : sol.reports) {
    r.property = label + "." + r.property;
    out.reports.push_back(std::move(r));
  }
  out.solutions.push_back({label, std::move(sol)});
}

std::vector<VerificationReport> harmonic_battery(const BernoulliSolution& sol, std::uint64_t seed) {
  return {verify_cone_comparison(sol.potential, 100, seed), verify_slope_estimates(sol.potential)};
}

nlohmann::json convexity_diagnostics(const ScalarField& u) {
  nlohmann::json j = nlohmann::json::object();
  for (double t : {0.25, 0.5, 0.75}) j[cat("level_", t)] = sublevel_convexity_defect(u, t);
  return j;
}

void append(std::vector<VerificationReport>& into, std::vector<VerificationReport> more,
            const std::string& prefix) {
  for (auto& r : more) {
    r.property = prefix + "." + r.property;
    into.push_back(std::move(r));
  }
}

// w_{1/lambda} with the full battery, including the sandwich bounds.
BernoulliSolution parallel_solution(const BernoulliSetup& s, double lambda,
                                    const SolveOptions& opts, nlohmann::json& diag) {
  BernoulliSolution w = solve_interior_bernoulli(s, lambda, opts);
  w.reports = core_battery(w, s.d);
  const SandwichResult sw = verify_sandwich(w, s.d);
  w.reports.push_back(sw.inequalities);
  w.reports.push_back(sw.equalities);
  diag["sandwich_max_slack_off_rays"] = sw.max_slack_off_rays;
  diag["ray_set_nodes"] = sw.ray_nodes;
  return w;
}

}  // namespace

ScenarioResult scenario(const std::string& name, double lambda, double h,
                        const SolveOptions& opts) {
  const auto prims = named_domain(name);
  if (!prims || name == "strip") throw std::invalid_argument("unknown scenario: " + name);
  BernoulliSetup s(build_domain(*prims), h);
  ScenarioResult out;
  out.name = name;
  out.lambda = lambda;
  out.diagnostics = nlohmann::json::object();
  const double r = 1.0 / lambda;
  const BernoulliTolerances tol = BernoulliTolerances::make(h, lambda, opts.tol_residual);
  const double p1 = 2.0 * std::sqrt(2.0) - 4.0;

  if (name == "ball" || name == "square") {
    nlohmann::json diag;
    BernoulliSolution w = parallel_solution(s, lambda, opts, diag);
    append(w.reports, harmonic_battery(w, 1), "harmonic");
    if (name == "ball") {
      double err = 0.0;
      std::optional<Point> at;
      for (Index j = 0; j < s.grid.ny; ++j)
        for (Index i = 0; i < s.grid.nx; ++i) {
          if (!s.d.inside(i, j) || s.d(i, j) >= r) continue;
          const double exact = 1.0 - lambda * s.d(i, j);
          if (std::abs(w.u()(i, j) - exact) > err) {
            err = std::abs(w.u()(i, j) - exact);
            at = s.grid.node(i, j);
          }
        }
      w.reports.push_back(VerificationReport::make("closed_form", err, tol.eq, at,
                                                   "w(x) = 1 - lambda (R - |x|) on the annulus"));
    } else {
      const double slack = diag["sandwich_max_slack_off_rays"].get<double>();
      w.reports.push_back(VerificationReport::make(
          "sandwich_strict_off_rays", std::max(0.0, 10.0 * h - slack), 0.0, {},
          "sandwich bounds are strict away from the ray set",
          cat("largest deviation from equality off the ray set ", slack, ", required >= ", 10.0 * h)));
    }
    // Uniqueness witness: the zero set of the solution is the characterizing member.
    w.reports.push_back(membership_report(k_lambda_membership(s, lambda, w.potential.K),
                                          "k_lambda_membership"));
    diag["level_set_convexity_defect"] = convexity_diagnostics(w.u());
    out.diagnostics["w"] = diag;
    add_solution(out, "w", std::move(w));
    return out;
  }

  if (name == "nonconn") {
    nlohmann::json diag;
    BernoulliSolution w = parallel_solution(s, lambda, opts, diag);
    append(w.reports, harmonic_battery(w, 1), "harmonic");
    out.diagnostics["w"] = diag;

    // The one-sided sets end in zero-angle cusps at p and -p; their node masks
    // serve as K (exact cut points inside the cusps make the solve stiff).
    const CompactMask Km = parallel_component_closure(s, r, Point(-4, 0));
    const CompactMask Kp = parallel_component_closure(s, r, Point(4, 0));
    BernoulliSolution um = characterize(s, lambda, Km, opts);
    BernoulliSolution up = characterize(s, lambda, Kp, opts);
    append(um.reports, harmonic_battery(um, 2), "harmonic");
    append(up.reports, harmonic_battery(up, 3), "harmonic");
    um.reports.push_back(membership_report(k_lambda_membership(s, lambda, Km), "k_lambda_membership"));
    up.reports.push_back(membership_report(k_lambda_membership(s, lambda, Kp), "k_lambda_membership"));
    um.reports.push_back(verify_harnack(um.potential, Point(4, 0), {Point(4, 0), Point(4, 3)}));
    up.reports.push_back(verify_harnack(up.potential, Point(-4, 0), {Point(-4, 0), Point(-4, 3)}));

    // On A-: left of p and outside the closed parallel set, u- agrees with w.
    double sup_a = 0.0;
    std::optional<Point> at;
    for (Index j = 0; j < s.grid.ny; ++j)
      for (Index i = 0; i < s.grid.nx; ++i) {
        const Point x = s.grid.node(i, j);
        if (!s.d.inside(i, j) || s.d(i, j) >= r || x.x() >= p1) continue;
        const double diff = std::abs(um.u()(i, j) - w.u()(i, j));
        if (diff > sup_a) {
          sup_a = diff;
          at = x;
        }
      }
    out.reports.push_back(VerificationReport::make(
        "agreement_on_A_minus", sup_a, tol.eq, at,
        "the one-sided potential equals w on the region left of p"));

    const double d_pm = sup_difference(um.u(), up.u());
    out.reports.push_back(VerificationReport::make(
        "distinct_one_sided", std::max(0.0, 0.3 - d_pm), 0.0, {},
        "more than one non-trivial solution", cat("sup |u- - u+| = ", d_pm, ", required >= 0.3")));
    out.diagnostics["sup_diff"] = {{"u_minus_u_plus", d_pm},
                                   {"w_u_minus", sup_difference(w.u(), um.u())},
                                   {"w_u_plus", sup_difference(w.u(), up.u())}};

    // A member with a segment of isolated points: closure(Omega_1^-) plus every other node of [p, q].
    CompactMask Kc = Km;
    Kc.member = Kc.member || alternating_segment_nodes(s.grid, Point(p1, 0), Point(4, 0)).member;
    BernoulliSolution uc = characterize(s, lambda, Kc, opts);
    uc.reports.push_back(membership_report(k_lambda_membership(s, lambda, Kc), "k_lambda_membership"));

    add_solution(out, "w", std::move(w));
    add_solution(out, "u_minus", std::move(um));
    add_solution(out, "u_plus", std::move(up));
    add_solution(out, "u_minus_segment", std::move(uc));
    return out;
  }

  // nonreg
  const H2Report h2 = check_h2(s.d, r, s.domain.tau_geom());
  Index off_axis = 0;
  for (Index k : h2.flagged) {
    const Point x = s.grid.node(k);
    if (std::abs(x.y()) > s.grid.h || x.x() < p1 - s.grid.h) ++off_axis;
  }
  const int failed = int(h2.pass) + int(off_axis > 0);
  out.reports.push_back(VerificationReport::make(
      "h2_failure_detected", failed, 0.0, {}, "{d >= 1/lambda} differs from the closure of the parallel set",
      cat(h2.flagged.size(), " flagged nodes, ", off_axis, " off the axis toward (4,0); worst distance ",
          h2.worst_distance)));
  out.diagnostics["h2_flagged"] = h2.flagged.size();

  nlohmann::json diag;
  BernoulliSolution w = solve_interior_bernoulli(s, lambda, opts);
  w.reports = core_battery(w, s.d);
  append(w.reports, harmonic_battery(w, 1), "harmonic");
  out.diagnostics["w"] = diag;

  const CompactMask Km = parallel_component_closure(s, r, Point(-4, 0));
  CompactMask Kc = Km;
  Kc.member = Kc.member || alternating_segment_nodes(s.grid, Point(p1, 0), Point(4, 0)).member;
  const KLambdaMembership m = k_lambda_membership(s, lambda, Kc);
  out.reports.push_back(membership_report(m, "segment_member.k_lambda_membership"));
  if (m.member()) {
    BernoulliSolution uc = characterize(s, lambda, Kc, opts);
    append(uc.reports, harmonic_battery(uc, 2), "harmonic");
    add_solution(out, "w", std::move(w));
    add_solution(out, "u_segment", std::move(uc));
  } else {
    add_solution(out, "w", std::move(w));
  }
  return out;
}

}  // namespace infbern

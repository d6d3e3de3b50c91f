// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "infbern/bernoulli.hpp"
#include "infbern/functionals.hpp"
#include "infbern/radial.hpp"
#include "infbern/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace infbern;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void line(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d: %s  %s  [%s]\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class... Ts>
std::string cat(const Ts&... xs) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << xs);
  return os.str();
}

std::string failed_reports(const std::vector<VerificationReport>& reps) {
  std::string s;
  for (const auto& r : reps)
    if (!r.pass) s += (s.empty() ? "" : ", ") + r.property;
  return s.empty() ? "all reports pass" : "failing: " + s;
}

void radial_roots() {
  const auto t0 = Clock::now();
  const auto rb = radial_solve(2, 3.0, 1.0, 3.0);
  const double secs = seconds_since(t0);
  const double tm = (3 - std::sqrt(3.0)) / 6, tp = (3 + std::sqrt(3.0)) / 6;
  const double e1 = std::abs(*rb.rho_hyper - tm * tm), e2 = std::abs(*rb.rho_ell - tp * tp);
  const double f = std::max(std::abs(f_alpha(rb, *rb.rho_hyper)), std::abs(f_alpha(rb, *rb.rho_ell)));
  line(1, rb.has_roots() && e1 <= 1e-10 && e2 <= 1e-10 && f <= 1e-12 && secs < 1.0,
       "radial roots n=2 p=3 R=1 lambda=3",
       cat("|rho'-ref|=", e1, " |rho''-ref|=", e2, " max|f|=", f, " t=", secs, "s"));
}

void critical_constant() {
  const double lp = critical_lambda(2, 3.0, 1.0);
  const auto below = radial_solve(2, 3.0, 1.0, 1.9);
  const auto at = radial_solve(2, 3.0, 1.0, 2.0);
  const bool dbl = at.has_roots() && *at.rho_hyper == *at.rho_ell && std::abs(*at.rho_hyper - 0.25) <= 1e-8;
  line(2, lp == 2.0 && !below.has_roots() && dbl, "critical constant lambda_3(B_1) = 2",
       cat("lambda_p=", lp, " roots at 1.9: ", below.has_roots(), " double root at 2: ",
           at.has_roots() ? *at.rho_hyper : NAN));
}

void asymptotics() {
  const auto t0 = Clock::now();
  const auto t = sweep_p(2, 1.0, 3.0, std::vector<double>{5, 10, 20, 50, 100});
  const double secs = seconds_since(t0);
  const auto& last = t.rows.back();
  const bool ok = last.rho_hyper && *last.rho_hyper <= 0.01 && std::abs(*last.rho_ell - 2.0 / 3) <= 0.05 &&
                  *last.sup_diff <= 0.1 && secs < 5.0;
  line(3, ok, "p-asymptotics of the radial solutions",
       cat("rho'_100=", *last.rho_hyper, " |rho''_100-2/3|=", std::abs(*last.rho_ell - 2.0 / 3),
           " sup diff=", *last.sup_diff, " t=", secs, "s"));
}

void constant_limit() {
  const auto t = bernoulli_constant_limit(2, 1.0, std::vector<double>{3, 5, 10, 20, 50, 100, 200});
  line(4, t.decreasing && t.final_gap <= 0.05, "lambda_p(B_1) decreases to 1",
       cat("lambda_200 - 1 = ", t.final_gap));
}

struct Produced {
  std::string label;
  BernoulliSolution sol;
  const ScalarField* d;
};

void ball_exactness(std::vector<Produced>& out, const BernoulliSetup& s) {
  const auto t0 = Clock::now();
  BernoulliSolution sol = solve_interior_bernoulli(s, 3.0, {});
  const double secs = seconds_since(t0);
  double err = 0.0;
  for (Index k = 0; k < s.grid.size(); ++k)
    if (s.d.inside.data()[k] && s.d.values.data()[k] < 1.0 / 3)
      err = std::max(err, std::abs(sol.u().values.data()[k] - (1 - 3 * s.d.values.data()[k])));
  const double tol = 5 * s.grid.h * 3;
  line(5, err <= tol && secs < 120.0, "ball B_1, lambda=3, h=1/128 against 1 - 3(1-|x|)",
       cat("max err=", err, " tol=", tol, " t=", secs, "s"));
  out.push_back({"ball", std::move(sol), &s.d});
}

void sandwich(std::vector<Produced>& out, const BernoulliSetup& s) {
  BernoulliSolution sol = solve_interior_bernoulli(s, 1.0, {});
  const SandwichResult sw = verify_sandwich(sol, s.d);
  const double h = s.grid.h;
  const bool ok = sw.inequalities.pass && sw.inequalities.tolerance <= 5 * h + 1e-15 && sw.equalities.pass &&
                  sw.equalities.tolerance <= 5 * h + 1e-15 && sw.max_slack_off_rays > 10 * h;
  std::string where = sw.slack_location ? cat(" at (", sw.slack_location->x(), ",", sw.slack_location->y(), ")") : "";
  line(6, ok, "sandwich bounds on the square, lambda=1, h=1/64",
       cat("ineq=", sw.inequalities.worst_violation, " eq=", sw.equalities.worst_violation, " tol=", 5 * h,
           " slack off rays=", sw.max_slack_off_rays, where, " vs ", 10 * h));
  out.push_back({"square", std::move(sol), &s.d});
}

void harnack() {
  const Domain dom = build_domain(*named_domain("ball"));
  const double h = 1.0 / 64;
  const Grid g = Grid::covering(dom.bounding_box(), h);
  CompactMask K(g);
  for (Index k = 0; k < g.size(); ++k) K.member.data()[k] = g.node(k).norm() <= 0.5;
  const Potential p = solve_potential(dom, K, g, {}, [](const Point& x) { return x.norm() - 0.5; });
  const double w = p.field.sample(Point(0.75, 0));
  const auto rep = verify_harnack(p, Point(0.75, 0), {Point(0.75, 0), Point(1, 0)});
  line(8, rep.pass && w >= std::exp(-1.0) - 5 * h && std::abs(w - 0.5) <= 5 * h,
       "Harnack bound on the annulus at (0.75,0), h=1/64",
       cat("w=", w, " bound=", std::exp(-1.0), " |w-0.5|=", std::abs(w - 0.5), " tol=", 5 * h));
}

std::vector<VerificationReport> with_prefix(const std::vector<VerificationReport>& reps,
                                            const std::string& prefix) {
  std::vector<VerificationReport> out;
  for (const auto& r : reps)
    if (r.property.rfind(prefix, 0) == 0) out.push_back(r);
  return out;
}

void multiplicity(std::vector<Produced>& out, BernoulliSetup& s) {
  const ScenarioResult res = scenario("nonconn", 1.0, 0.05, {});
  std::vector<VerificationReport> relevant;
  for (const char* p : {"w.", "u_minus.", "u_plus.", "agreement_on_A_minus", "distinct_one_sided"})
    for (const auto& r : with_prefix(res.reports, p)) relevant.push_back(r);
  const auto find = [&](const std::string& name) {
    for (const auto& r : res.reports)
      if (r.property == name) return r.worst_violation;
    return double(NAN);
  };
  line(9, all_pass(relevant) && relevant.size() > 10, "three solutions on the dumbbell, lambda=1, h=0.05",
       cat(failed_reports(relevant), "; sup_A- |u- - w|=", find("agreement_on_A_minus"), " tol=", 5 * 0.05,
           "; sup|u- - u+|=", res.diagnostics["sup_diff"]["u_minus_u_plus"].get<double>(), " vs 0.3"));
  for (const auto& ns : res.solutions) out.push_back({"nonconn." + ns.label, ns.solution, &s.d});
}

void h2_failure(std::vector<Produced>& out, BernoulliSetup& s) {
  const ScenarioResult res = scenario("nonreg", 1.0, 0.05, {});
  const H2Report h2 = check_h2(s.d, 1.0, s.domain.tau_geom());
  const auto rel = with_prefix(res.reports, "h2_failure_detected");
  const auto mem = with_prefix(res.reports, "segment_member.k_lambda_membership");
  line(10, !h2.pass && all_pass(rel) && rel.size() == 1 && all_pass(mem) && mem.size() == 1,
       "H2 failure and segment member on the nonreg dumbbell, h=0.05",
       cat(h2.flagged.size(), " flagged nodes; ", rel.empty() ? "" : rel[0].note, "; membership ",
           mem.empty() ? "missing" : (mem[0].pass ? "(T,T,T)" : mem[0].note)));
  for (const auto& ns : res.solutions) out.push_back({"nonreg." + ns.label, ns.solution, &s.d});
}

void gradient_and_fb(const std::vector<Produced>& sols) {
  std::string failing;
  double worst_ratio = 0.0;
  for (const auto& p : sols) {
    const auto g = verify_gradient_bound(p.sol);
    const bool tol_ok = g.tolerance <= 5 * p.sol.u().grid.h * p.sol.lambda + 1e-15;
    bool ok = g.pass && tol_ok;
    worst_ratio = std::max(worst_ratio, g.worst_violation / g.tolerance);
    if (!p.sol.free_boundary.empty()) {
      const auto f = verify_fb_location(p.sol, *p.d);
      ok = ok && f.pass;
      worst_ratio = std::max(worst_ratio, f.worst_violation / f.tolerance);
    }
    if (!ok) failing += " " + p.label;
  }
  line(7, failing.empty() && sols.size() >= 8, "gradient bound and free-boundary location at 5h*lambda",
       cat(sols.size(), " solutions; worst violation/tolerance=", worst_ratio,
           failing.empty() ? "" : "; failing:" + failing));
}

void jp_monotone() {
  const Domain dom = build_domain(*named_domain("square"));
  const Grid g = Grid::covering(dom.bounding_box(), 1.0 / 32);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0), pdist(1.0, 60.0);
  int pass = 0, total = 0;
  double worst = -INFINITY;
  for (int f = 0; f < 20; ++f) {
    // Lipschitz field: truncated sum of random cones and planes.
    const Point c(4 * unit(rng) - 2, 4 * unit(rng) - 2), a(unit(rng) - 0.5, unit(rng) - 0.5);
    const double s = 2 * unit(rng), off = unit(rng) - 0.3, lambda = 0.5 + 2 * unit(rng);
    ScalarField u(g, inside_mask(dom, g));
    for (Index k = 0; k < g.size(); ++k) {
      const Point x = g.node(k);
      u.values.data()[k] = std::clamp(off + s * (x - c).norm() * 0.5 + a.dot(x), 0.0, 1.0);
    }
    const EnergyData e(u, 1e-7);
    for (int k = 0; k < 5; ++k) {
      double p = 1.0 + pdist(rng), q = 1.0 + pdist(rng);
      if (p > q) std::swap(p, q);
      const auto r = verify_monotone_in_p(e, lambda, p, q);
      worst = std::max(worst, r.worst_violation);
      pass += r.pass;  // slack J_q - J_p >= -1e-12
      ++total;
    }
  }
  line(11, pass == 100 && total == 100, "J_p monotone in p on random Lipschitz fields",
       cat(pass, "/", total, " pass; largest J_p - J_q=", worst));
}

struct SweepErrors {
  double h;
  int width;
  double cone, annulus;
  double cone_cmp;
};

void property_suites() {
  const Domain dom = build_domain(*named_domain("ball"));
  // Discrete comparison principle on random Dirichlet pairs f <= g.
  const Grid g = Grid::covering(dom.bounding_box(), 1.0 / 32);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), gap(0.0, 0.3);
  int violations = 0;
  double worst_cmp = -INFINITY;
  for (int t = 0; t < 50; ++t) {
    const double a = coef(rng), b = coef(rng), c = coef(rng), ph = 3 * coef(rng);
    const double g0 = gap(rng), g1 = gap(rng), fr = 1 + 3 * gap(rng);
    auto f = [=](const Point& x) { return a * x.x() + b * x.y() * x.y() + c * std::cos(fr * x.x() + ph); };
    auto gg = [=](const Point& x) { return f(x) + g0 + g1 * (1 + std::sin(5 * x.y() + ph)); };
    DirichletProblem pf{g, f, Mask::Constant(g.nx, g.ny, false), {}, {}, {}};
    DirichletProblem pg = pf;
    pg.boundary_value = gg;
    const DirichletSolution uf = solve_dirichlet(dom, pf, {});
    const DirichletSolution ug = solve_dirichlet(dom, pg, {});
    double worst = -INFINITY;
    for (Index k = 0; k < g.size(); ++k)
      if (uf.free.data()[k]) worst = std::max(worst, uf.field.values.data()[k] - ug.field.values.data()[k]);
    worst_cmp = std::max(worst_cmp, worst);
    if (worst > uf.tolerance + ug.tolerance) ++violations;
  }

  // Error against the cone |x| and the annulus profile along the refinement path.
  std::vector<SweepErrors> rows;
  double worst_cone_ratio = 0.0;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    SolveOptions opts;
    opts.stencil = refined_stencil(h);
    const Grid gh = Grid::covering(dom.bounding_box(), h);
    CompactMask centre(gh), disk(gh);
    const Eigen::Vector2i o = gh.nearest(Point(0, 0));
    centre.member(o.x(), o.y()) = true;
    for (Index k = 0; k < gh.size(); ++k) disk.member.data()[k] = gh.node(k).norm() <= 0.5;
    const Potential pc = solve_potential(dom, centre, gh, opts);
    const Potential pa = solve_potential(dom, disk, gh, opts, [](const Point& x) { return x.norm() - 0.5; });
    double ec = 0.0, ea = 0.0;
    for (Index k = 0; k < gh.size(); ++k) {
      if (!pc.field.inside.data()[k]) continue;
      const double r = gh.node(k).norm();
      ec = std::max(ec, std::abs(pc.field.values.data()[k] - r));
      ea = std::max(ea, std::abs(pa.field.values.data()[k] - std::clamp((r - 0.5) / 0.5, 0.0, 1.0)));
    }
    const auto rc = verify_cone_comparison(pc, 100, 31);
    const auto ra = verify_cone_comparison(pa, 100, 32);
    for (const auto& r : {rc, ra}) worst_cone_ratio = std::max(worst_cone_ratio, r.worst_violation / (5 * h));
    rows.push_back({h, opts.stencil.width, ec, ea, std::max(rc.worst_violation, ra.worst_violation)});
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < rows.size(); ++k)
    decreasing = decreasing && rows[k].cone < rows[k - 1].cone && rows[k].annulus < rows[k - 1].annulus;
  std::string errs;
  for (const auto& r : rows)
    errs += cat(" h=1/", int(std::lround(1 / r.h)), " w=", r.width, ": cone ", r.cone, " annulus ", r.annulus, ";");
  line(12, violations == 0 && worst_cone_ratio <= 1.0 && decreasing,
       "comparison principle, cone sampling, error decay",
       cat(violations, "/50 comparison violations (max u_f-u_g=", worst_cmp,
           "); worst cone violation/(5h)=", worst_cone_ratio, ";", errs));
}

}  // namespace

int main() {
  radial_roots();
  critical_constant();
  asymptotics();
  constant_limit();

  std::vector<Produced> produced;
  const BernoulliSetup ball(build_domain(*named_domain("ball")), 1.0 / 128);
  const BernoulliSetup square(build_domain(*named_domain("square")), 1.0 / 64);
  BernoulliSetup nonconn(build_domain(*named_domain("nonconn")), 0.05);
  BernoulliSetup nonreg(build_domain(*named_domain("nonreg")), 0.05);
  ball_exactness(produced, ball);
  sandwich(produced, square);
  harnack();
  multiplicity(produced, nonconn);
  h2_failure(produced, nonreg);
  gradient_and_fb(produced);
  jp_monotone();
  property_suites();

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#include "infbern/cli.hpp"

#include "infbern/bernoulli.hpp"
#include "infbern/field_io.hpp"
#include "infbern/functionals.hpp"
#include "infbern/radial.hpp"
#include "infbern/verification.hpp"

#include <CLI11.hpp>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace infbern {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string domain = "ball";
  std::optional<double> h;
  double lambda = 1.0;
  std::string out = ".";
  std::uint64_t seed = 1;
  double tol = 1e-8;
  int max_sweeps = 20000;
  std::string mode = "serial";
  int width = 3;
  int threads = 0;
  std::string zero_set;
  std::string field;
  std::string name;
  int n = 2;
  double p = 3.0;
  double R = 1.0;
  std::string p_list;
  double threshold = 0.1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Printer {
 public:
  Printer(std::ostream& out, bool color) : out_(out), color_(color) {}

  void report(const VerificationReport& r) {
    const char* tag = r.pass ? "PASS" : "FAIL";
    if (color_) out_ << (r.pass ? "\033[32m" : "\033[31m") << tag << "\033[0m";
    else out_ << tag;
    out_ << "  " << r.property << "  worst=" << r.worst_violation << " tol=" << r.tolerance;
    if (!r.note.empty()) out_ << "  (" << r.note << ")";
    out_ << '\n';
  }
  void reports(const std::vector<VerificationReport>& rs) {
    for (const auto& r : rs) report(r);
  }
  std::ostream& out() { return out_; }

 private:
  std::ostream& out_;
  bool color_;
};

bool use_color(const std::ostream& out) {
  if (std::getenv("NO_COLOR")) return false;
  return &out == &std::cout && isatty(STDOUT_FILENO);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number list: " + text);
    }
  }
  if (v.empty()) throw UsageError("empty number list");
  return v;
}

struct LoadedDomain {
  Domain domain;
  double h;
};

LoadedDomain load_domain(const RunConfig& cfg) {
  if (auto prims = named_domain(cfg.domain)) return {build_domain(*prims), cfg.h.value_or(0.02)};
  std::ifstream is(cfg.domain);
  if (!is) throw UsageError("unknown domain name or unreadable spec file: " + cfg.domain);
  std::stringstream buf;
  buf << is.rdbuf();
  const DomainSpec spec = parse_domain_spec(buf.str());
  return {build_domain(spec.primitives), cfg.h.value_or(spec.h.value_or(0.02))};
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.tol_residual = cfg.tol;
  o.max_sweeps = cfg.max_sweeps;
  if (cfg.mode == "serial") o.mode = SolveMode::deterministic_serial;
  else if (cfg.mode == "jacobi") o.mode = SolveMode::parallel_jacobi;
  else throw UsageError("mode must be serial or jacobi");
  o.stencil.width = cfg.width;
  o.threads = cfg.threads;
  return o;
}

fs::path out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) throw std::runtime_error("cannot create output directory " + cfg.out);
  return fs::path(cfg.out);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::vector<double> coords(const std::string& text, std::size_t count) {
  const auto v = parse_list(text);
  if (v.size() != count) throw UsageError("expected " + std::to_string(count) + " coordinates: " + text);
  return v;
}

// Zero set from a spec: "point:x,y", "segment:x0,y0,x1,y1", "parallel:r", or
// a FIELD mask file. For "parallel" the exact level function is returned too.
CompactMask zero_set_from(const std::string& spec, const BernoulliSetup& s,
                          std::function<double(const Point&)>* level) {
  const auto colon = spec.find(':');
  const std::string kind = colon == std::string::npos ? "" : spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  CompactMask K(s.grid);
  if (kind == "point") {
    const auto c = coords(rest, 2);
    const auto n = s.grid.nearest(Point(c[0], c[1]));
    K.member(n.x(), n.y()) = true;
  } else if (kind == "segment") {
    const auto c = coords(rest, 4);
    const Point a(c[0], c[1]), b(c[2], c[3]);
    const int steps = std::max(1, int(std::ceil(2.0 * (b - a).norm() / s.grid.h)));
    for (int k = 0; k <= steps; ++k) {
      const auto n = s.grid.nearest(a + (double(k) / steps) * (b - a));
      K.member(n.x(), n.y()) = true;
    }
  } else if (kind == "parallel") {
    const double r = coords(rest, 1)[0];
    K = parallel_closure_mask(s.d, r, s.domain.tau_geom());
    if (level) {
      const Domain* dom = &s.domain;
      *level = [dom, r](const Point& x) { return r - dom->distance(x); };
    }
  } else {
    K = load_mask(spec);
    if (!K.grid.same_as(s.grid)) throw UsageError("mask grid does not match the domain grid");
  }
  return K;
}

json setup_json(const RunConfig& cfg, const BernoulliSetup& s) {
  return {{"command", cfg.command},
          {"domain", cfg.domain},
          {"h", s.grid.h},
          {"grid", {{"nx", s.grid.nx}, {"ny", s.grid.ny}, {"origin", {s.grid.origin.x(), s.grid.origin.y()}}}},
          {"inradius", {{"value", s.inradius.value}, {"uncertainty", s.inradius.uncertainty}}}};
}

int finish(Printer& pr, const fs::path& dir, json j, const std::vector<VerificationReport>& reports) {
  pr.reports(reports);
  const bool ok = all_pass(reports);
  j["reports"] = to_json(reports);
  j["pass"] = ok;
  write_json(dir / "report.json", j);
  return ok ? 0 : 2;
}

json solution_json(const BernoulliSolution& sol) {
  return {{"lambda", sol.lambda},
          {"kind", to_string(sol.kind)},
          {"free_boundary_nodes", sol.free_boundary.size()},
          {"zero_nodes", sol.zero_set.count()},
          {"residual", sol.potential.residual},
          {"sweeps", sol.potential.sweeps_used},
          {"newton_steps", sol.potential.newton_steps}};
}

// Field read back from disk, wrapped as a solution candidate on the domain.
BernoulliSolution loaded_solution(const RunConfig& cfg, const BernoulliSetup& s, double lambda) {
  ScalarField u = load_field(cfg.field);
  if (!u.grid.same_as(s.grid)) throw UsageError("field grid does not match the domain grid at this h");
  u.inside = s.d.inside;
  Potential p;
  p.stencil = support_stencil(u, {cfg.width});
  p.free = u.inside;
  p.K = CompactMask(u.grid, u.inside && (u.values <= 10.0 * cfg.tol));
  p.enclosed = Mask::Constant(u.grid.nx, u.grid.ny, false);
  p.field = std::move(u);
  return make_solution(std::move(p), lambda, cfg.tol);
}

BernoulliSetup make_setup(const RunConfig& cfg) {
  LoadedDomain ld = load_domain(cfg);
  return BernoulliSetup(std::move(ld.domain), ld.h);
}

int cmd_distance(const RunConfig& cfg, Printer& pr) {
  const BernoulliSetup s = make_setup(cfg);
  const fs::path dir = out_dir(cfg);
  save_field((dir / "distance.field").string(), s.d);
  json j = setup_json(cfg, s);
  j["inradius"]["argmax"] = {s.inradius.argmax.x(), s.inradius.argmax.y()};
  j["inside_components"] = connected_components(s.d.inside).count();
  pr.out() << "inradius " << s.inradius.value << " +- " << s.inradius.uncertainty << '\n';
  return finish(pr, dir, j, {});
}

int cmd_potential(const RunConfig& cfg, Printer& pr) {
  const BernoulliSetup s = make_setup(cfg);
  if (cfg.zero_set.empty()) throw UsageError("potential needs --K");
  std::function<double(const Point&)> level;
  const CompactMask K = zero_set_from(cfg.zero_set, s, &level);
  const Potential p = solve_potential(s.domain, K, s.grid, solve_options(cfg), level);
  const fs::path dir = out_dir(cfg);
  save_field((dir / "potential.field").string(), p.field);
  save_mask((dir / "K.mask").string(), K);
  std::vector<VerificationReport> reps{
      VerificationReport::make("solver_residual", p.residual, p.tolerance, {},
                               "discrete mid-slope equation at every free node",
                               "slope residual " + std::to_string(residual(p))),
      verify_cone_comparison(p, 100, cfg.seed), verify_slope_estimates(p)};
  json j = setup_json(cfg, s);
  j["sweeps"] = p.sweeps_used;
  j["newton_steps"] = p.newton_steps;
  return finish(pr, dir, j, reps);
}

std::vector<VerificationReport> full_battery(const BernoulliSolution& sol, const BernoulliSetup& s,
                                             bool sandwich) {
  std::vector<VerificationReport> reps{verify_gradient_bound(sol), verify_bounds(sol)};
  if (!sol.free_boundary.empty()) reps.push_back(verify_fb_location(sol, s.d));
  if (sandwich) {
    const SandwichResult sw = verify_sandwich(sol, s.d);
    reps.push_back(sw.inequalities);
    reps.push_back(sw.equalities);
  }
  return reps;
}

int cmd_bernoulli_solve(const RunConfig& cfg, Printer& pr) {
  const BernoulliSetup s = make_setup(cfg);
  const fs::path dir = out_dir(cfg);
  json j = setup_json(cfg, s);
  try {
    const BernoulliSolution sol = solve_interior_bernoulli(s, cfg.lambda, solve_options(cfg));
    save_field((dir / "u.field").string(), sol.u());
    save_mask((dir / "zero_set.mask").string(), sol.zero_set);
    j["solution"] = solution_json(sol);
    return finish(pr, dir, j, full_battery(sol, s, true));
  } catch (const BernoulliRefusal& e) {
    j["refusal"] = e.what();
    j["certificate"] = to_json(e.certificate);
    write_json(dir / "report.json", j);
    pr.out() << "refused: " << e.what() << '\n' << to_json(e.certificate).dump(2) << '\n';
    return 1;
  }
}

int cmd_bernoulli_verify(const RunConfig& cfg, Printer& pr) {
  if (cfg.field.empty()) throw UsageError("bernoulli-verify needs --field");
  const BernoulliSetup s = make_setup(cfg);
  const BernoulliSolution sol = loaded_solution(cfg, s, cfg.lambda);
  const fs::path dir = out_dir(cfg);
  json j = setup_json(cfg, s);
  j["solution"] = solution_json(sol);
  return finish(pr, dir, j, full_battery(sol, s, sol.kind == SolutionKind::nontrivial));
}

int zero_set_command(const RunConfig& cfg, Printer& pr, bool trivial) {
  if (cfg.zero_set.empty()) throw UsageError(cfg.command + " needs --K");
  const BernoulliSetup s = make_setup(cfg);
  std::function<double(const Point&)> level;
  const CompactMask K = zero_set_from(cfg.zero_set, s, &level);
  const fs::path dir = out_dir(cfg);
  json j = setup_json(cfg, s);
  const KLambdaMembership m = k_lambda_membership(s, cfg.lambda, K);
  j["membership"] = {{"cond_i", m.cond_i}, {"cond_ii", m.cond_ii}, {"cond_iii", m.cond_iii}};
  try {
    const BernoulliSolution sol = trivial ? make_trivial_solution(s, cfg.lambda, K, solve_options(cfg))
                                          : characterize(s, cfg.lambda, K, solve_options(cfg), level);
    save_field((dir / "u.field").string(), sol.u());
    j["solution"] = solution_json(sol);
    return finish(pr, dir, j, sol.reports);
  } catch (const ZeroSetRejected& e) {
    j["rejected"] = {{"condition", e.condition}, {"reason", e.what()}};
    write_json(dir / "report.json", j);
    pr.out() << "rejected (condition " << e.condition << "): " << e.what() << '\n';
    return 1;
  }
}

int cmd_radial(const RunConfig& cfg, Printer& pr) {
  const auto rb = radial_solve<double>(cfg.n, cfg.p, cfg.R, cfg.lambda);
  const fs::path dir = out_dir(cfg);
  auto& os = pr.out();
  os.precision(12);
  os << "alpha=" << rb.alpha << "\nlambda_p=" << rb.lambda_p << "\nm_alpha=" << rb.m_alpha
     << "\nrho_star=" << rb.rho_star << '\n';
  json j = {{"command", cfg.command}, {"n", rb.n}, {"p", rb.p}, {"R", rb.R}, {"lambda", rb.lambda},
            {"alpha", rb.alpha}, {"lambda_p", rb.lambda_p}, {"m_alpha", rb.m_alpha},
            {"rho_star", rb.rho_star}};
  std::vector<VerificationReport> reps;
  if (rb.has_roots()) {
    os << "rho_hyper=" << *rb.rho_hyper << "\nrho_ell=" << *rb.rho_ell << '\n';
    j["rho_hyper"] = *rb.rho_hyper;
    j["rho_ell"] = *rb.rho_ell;
    for (Branch b : {Branch::hyper, Branch::ell}) {
      const char* name = b == Branch::hyper ? "gradient_check_hyper" : "gradient_check_ell";
      reps.push_back(VerificationReport::make(name, gradient_check(rb, b), 1e-10, {},
                                              "|grad u_p| = lambda on the free boundary"));
    }
  } else {
    os << "no free-boundary radius (m_alpha > 0)\n";
    j["rho_hyper"] = nullptr;
    j["rho_ell"] = nullptr;
  }
  return finish(pr, dir, j, reps);
}

int cmd_sweep(const RunConfig& cfg, Printer& pr) {
  const auto ps = parse_list(cfg.p_list.empty() ? "5,10,20,50,100" : cfg.p_list);
  const auto t = sweep_p<double>(cfg.n, cfg.R, cfg.lambda, ps, cfg.threshold);
  const fs::path dir = out_dir(cfg);
  std::ofstream csv(dir / "sweep.csv");
  if (!csv) throw std::runtime_error("cannot write sweep.csv");
  write_csv(csv, t);
  write_csv(pr.out(), t);
  const auto& last = t.rows.back();
  json j = {{"command", cfg.command}, {"n", cfg.n}, {"R", cfg.R}, {"lambda", cfg.lambda},
            {"limit_rho_ell", cfg.R - 1.0 / cfg.lambda}};
  return finish(pr, dir, j,
                {VerificationReport::make("sweep_last_sup_diff", last.sup_diff.value_or(INFINITY),
                                          t.threshold, {}, "u_p -> 1 - lambda (R - |x|) uniformly")});
}

int cmd_constants(const RunConfig& cfg, Printer& pr) {
  const auto ps = parse_list(cfg.p_list.empty() ? "3,5,10,20,50,100,200" : cfg.p_list);
  const auto t = bernoulli_constant_limit<double>(cfg.n, cfg.R, ps);
  const fs::path dir = out_dir(cfg);
  std::ofstream csv(dir / "constants.csv");
  if (!csv) throw std::runtime_error("cannot write constants.csv");
  write_csv(csv, t);
  write_csv(pr.out(), t);
  json j = {{"command", cfg.command}, {"n", cfg.n}, {"R", cfg.R}, {"limit", 1.0 / cfg.R}};
  std::vector<VerificationReport> reps{
      VerificationReport::make("lambda_p_decreasing", t.decreasing ? 0.0 : 1.0, 0.0, {},
                               "lambda_p(B_R) decreases toward 1/R")};
  if (ps.back() >= 200.0)
    reps.push_back(VerificationReport::make("lambda_p_final_gap", t.final_gap, 0.05 / cfg.R, {},
                                            "lambda_p(B_R) -> 1/R"));
  return finish(pr, dir, j, reps);
}

int cmd_scenario(const RunConfig& cfg, Printer& pr) {
  const double h = cfg.h.value_or(0.02);
  const ScenarioResult res = scenario(cfg.name, cfg.lambda, h, solve_options(cfg));
  const fs::path dir = out_dir(cfg);
  json j = {{"command", cfg.command}, {"scenario", res.name}, {"lambda", res.lambda}, {"h", h}};
  json sols = json::object();
  for (const auto& ns : res.solutions) {
    save_field((dir / (ns.label + ".field")).string(), ns.solution.u());
    sols[ns.label] = solution_json(ns.solution);
  }
  j["solutions"] = sols;
  j["diagnostics"] = res.diagnostics;
  std::vector<VerificationReport> reps = res.reports;
  pr.out() << res.solutions.size() << " solutions\n";
  return finish(pr, dir, j, reps);
}

int cmd_jfunc(const RunConfig& cfg, Printer& pr) {
  if (cfg.field.empty()) throw UsageError("jfunc needs --field");
  const BernoulliSetup s = make_setup(cfg);
  ScalarField u = load_field(cfg.field);
  if (!u.grid.same_as(s.grid)) throw UsageError("field grid does not match the domain grid at this h");
  u.inside = s.d.inside;
  const double tau_zero = 10.0 * cfg.tol;
  const EnergyData e(u, tau_zero, {cfg.width});
  const auto ps = parse_list(cfg.p_list.empty() ? "2,5,10,50" : cfg.p_list);
  json j = setup_json(cfg, s);
  json rows = json::array();
  std::vector<VerificationReport> reps;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    rows.push_back({{"p", ps[k]}, {"J_p", J_p_evaluate(e, cfg.lambda, ps[k])}});
    pr.out() << "J_" << ps[k] << " = " << J_p_evaluate(e, cfg.lambda, ps[k]) << '\n';
    if (k > 0 && ps[k - 1] > 1.0 && ps[k - 1] <= ps[k])
      reps.push_back(verify_monotone_in_p(e, cfg.lambda, ps[k - 1], ps[k]));
  }
  const double jinf = J_inf_evaluate(e, cfg.lambda, 5.0 * s.grid.h * cfg.lambda);
  pr.out() << "J_inf = " << jinf << '\n';
  j["J_p"] = rows;
  j["J_inf"] = number(jinf);
  return finish(pr, out_dir(cfg), j, reps);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Infinity-Laplacian Bernoulli laboratory"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h

  auto common = [&](CLI::App* sub, bool solver) {
    sub->add_option("--domain", cfg.domain, "domain name (ball, square, strip, nonconn, nonreg) or JSON spec file");
    sub->add_option("--h", cfg.h, "grid spacing")->check(CLI::PositiveNumber);
    sub->add_option("--lambda", cfg.lambda, "Bernoulli constant")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "output directory");
    if (!solver) return;
    sub->add_option("--seed", cfg.seed, "seed for randomized checks");
    sub->add_option("--tol", cfg.tol, "solver tolerance relative to the data range")->check(CLI::PositiveNumber);
    sub->add_option("--max-sweeps", cfg.max_sweeps, "sweep limit");
    sub->add_option("--mode", cfg.mode, "serial or jacobi");
    sub->add_option("--width", cfg.width, "stencil width")->check(CLI::Range(1, 16));
    sub->add_option("--threads", cfg.threads, "threads for jacobi mode");
  };
  auto radial_opts = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "dimension")->check(CLI::Range(2, 1000));
    sub->add_option("--R", cfg.R, "ball radius")->check(CLI::PositiveNumber);
    sub->add_option("--lambda", cfg.lambda, "Bernoulli constant")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "output directory");
  };

  auto* distance = app.add_subcommand("distance", "distance field and inradius");
  common(distance, false);
  auto* potential = app.add_subcommand("potential", "infinity-harmonic potential of a zero set");
  common(potential, true);
  potential->add_option("--K", cfg.zero_set, "point:x,y | segment:x0,y0,x1,y1 | parallel:r | mask file")->required();
  auto* bsolve = app.add_subcommand("bernoulli-solve", "potential of the parallel set at 1/lambda");
  common(bsolve, true);
  auto* bverify = app.add_subcommand("bernoulli-verify", "verify a stored field as a solution");
  common(bverify, true);
  bverify->add_option("--field", cfg.field, "FIELD v1 file")->required();
  auto* charz = app.add_subcommand("characterize", "solve and verify for a member zero set");
  common(charz, true);
  charz->add_option("--K", cfg.zero_set, "zero set spec or mask file")->required();
  auto* trivial = app.add_subcommand("trivial", "trivial solution for a zero set without interior");
  common(trivial, true);
  trivial->add_option("--K", cfg.zero_set, "zero set spec or mask file")->required();
  auto* radial = app.add_subcommand("radial", "closed-form radial solution");
  radial_opts(radial);
  radial->add_option("--p", cfg.p, "exponent p > n");
  auto* sweep = app.add_subcommand("sweep-p", "free-boundary radii as p grows");
  radial_opts(sweep);
  sweep->add_option("--p-list", cfg.p_list, "comma-separated increasing p values");
  sweep->add_option("--threshold", cfg.threshold, "bound on the last sup difference");
  auto* constants = app.add_subcommand("constants", "critical constants lambda_p(B_R)");
  constants->add_option("--n", cfg.n, "dimension")->check(CLI::Range(2, 1000));
  constants->add_option("--R", cfg.R, "ball radius")->check(CLI::PositiveNumber);
  constants->add_option("--p-list", cfg.p_list, "comma-separated increasing p values");
  constants->add_option("--out", cfg.out, "output directory");
  auto* scen = app.add_subcommand("scenario", "multiplicity and uniqueness scenarios");
  common(scen, true);
  scen->add_option("name", cfg.name, "nonconn | nonreg | square | ball")->required();
  auto* jfunc = app.add_subcommand("jfunc", "J_p and J_inf of a stored field");
  common(jfunc, true);
  jfunc->add_option("--field", cfg.field, "FIELD v1 file")->required();
  jfunc->add_option("--p-list", cfg.p_list, "comma-separated p values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  Printer pr(out, use_color(out));
  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "distance") return cmd_distance(cfg, pr);
    if (cfg.command == "potential") return cmd_potential(cfg, pr);
    if (cfg.command == "bernoulli-solve") return cmd_bernoulli_solve(cfg, pr);
    if (cfg.command == "bernoulli-verify") return cmd_bernoulli_verify(cfg, pr);
    if (cfg.command == "characterize") return zero_set_command(cfg, pr, false);
    if (cfg.command == "trivial") return zero_set_command(cfg, pr, true);
    if (cfg.command == "radial") return cmd_radial(cfg, pr);
    if (cfg.command == "sweep-p") return cmd_sweep(cfg, pr);
    if (cfg.command == "constants") return cmd_constants(cfg, pr);
    if (cfg.command == "scenario") return cmd_scenario(cfg, pr);
    if (cfg.command == "jfunc") return cmd_jfunc(cfg, pr);
    err << "unknown subcommand\n";
    return 1;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace infbern

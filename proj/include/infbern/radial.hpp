// Closed-form radial solutions of the p-Bernoulli problem on a ball B_R in
// dimension n, and their behaviour as p grows.
//
//   alpha       = (p - n) / (p - 1)
//   f(rho)      = lambda rho^alpha + alpha rho^(alpha - 1) - lambda R^alpha
//   m_alpha     = (lambda / (1 - alpha))^(1 - alpha) - lambda R^alpha = f(rho*)
//   rho*        = (1 - alpha) / lambda, the minimizer of f
//   lambda_p    = (1 / R) (1 - alpha)^(1 - 1/alpha)
//   u(x)        = (|x|^alpha - rho^alpha) / (R^alpha - rho^alpha)
//
// Roots of f are the free-boundary radii: rho' < rho* < rho'' when m < 0.
#ifndef INFBERN_RADIAL_HPP
#define INFBERN_RADIAL_HPP

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace infbern {

enum class Branch { hyper, ell };

template <class Scalar = double>
struct RadialBernoulli {
  int n = 2;
  Scalar p{}, R{}, lambda{};
  Scalar alpha{};
  Scalar lambda_p{};
  Scalar m_alpha{};
  Scalar rho_star{};
  std::optional<Scalar> rho_hyper;  // rho'
  std::optional<Scalar> rho_ell;    // rho''

  bool has_roots() const { return rho_hyper.has_value(); }
  std::optional<Scalar> root(Branch b) const { return b == Branch::hyper ? rho_hyper : rho_ell; }
};

template <class Scalar>
Scalar f_alpha(Scalar alpha, Scalar lambda, Scalar R, Scalar rho) {
  using std::pow;
  return lambda * pow(rho, alpha) + alpha * pow(rho, alpha - 1) - lambda * pow(R, alpha);
}

template <class Scalar>
Scalar f_alpha(const RadialBernoulli<Scalar>& rb, Scalar rho) {
  return f_alpha(rb.alpha, rb.lambda, rb.R, rho);
}

/// Critical constant lambda_p(B_R).
template <class Scalar>
Scalar critical_lambda(int n, Scalar p, Scalar R) {
  using std::pow;
  if (!(p > Scalar(n))) throw std::invalid_argument("radial formulas need p > n");
  const Scalar alpha = (p - n) / (p - 1);
  return pow(1 - alpha, 1 - 1 / alpha) / R;
}

namespace detail {

// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs. Runs to
// the resolution of Scalar (at most 200 halvings), well below 1e-12 in rho.
template <class Scalar, class F>
Scalar bisect(F f, Scalar lo, Scalar hi) {
  using std::abs;
  Scalar flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (!(mid > lo && mid < hi)) break;
    const Scalar fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return abs(f(lo)) <= abs(f(hi)) ? lo : hi;
}

}  // namespace detail

template <class Scalar>
RadialBernoulli<Scalar> radial_solve(int n, Scalar p, Scalar R, Scalar lambda) {
  using std::abs;
  using std::pow;
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  if (!(p > Scalar(n))) throw std::invalid_argument("radial formulas need p > n");
  if (!(R > 0) || !(lambda > 0)) throw std::invalid_argument("R and lambda must be positive");

  RadialBernoulli<Scalar> rb;
  rb.n = n;
  rb.p = p;
  rb.R = R;
  rb.lambda = lambda;
  rb.alpha = (p - n) / (p - 1);
  rb.lambda_p = critical_lambda(n, p, R);
  rb.m_alpha = pow(lambda / (1 - rb.alpha), 1 - rb.alpha) - lambda * pow(R, rb.alpha);
  rb.rho_star = (1 - rb.alpha) / lambda;

  if (abs(rb.m_alpha) <= Scalar(1e-12)) {
    rb.rho_hyper = rb.rho_ell = rb.rho_star;
    return rb;
  }
  if (rb.m_alpha > 0) return rb;

  // At rho0 the singular term alone balances lambda R^alpha; half of it gives
  // a margin of about lambda R^alpha (1 - alpha) ln 2 that survives rounding.
  // For large p rho0 is tiny, roughly (alpha / (lambda R^alpha))^(p - 1).
  auto f = [&](Scalar rho) { return f_alpha(rb, rho); };
  Scalar lo = pow(rb.alpha / (lambda * pow(R, rb.alpha)), 1 / (1 - rb.alpha)) / 2;
  for (int k = 0; k < 64 && !(f(lo) > 0) && lo > 0; ++k) lo /= 2;
  if (!(f(lo) > 0 && f(rb.rho_star) < 0 && f(R) > 0 && rb.rho_star < R))
    throw std::logic_error("radial roots are not bracketed");
  rb.rho_hyper = detail::bisect(f, lo, rb.rho_star);
  rb.rho_ell = detail::bisect(f, rb.rho_star, R);
  return rb;
}

/// u at radius x_abs on the given branch. Throws if the branch has no root or
/// x_abs lies outside [rho, R].
template <class Scalar>
Scalar radial_profile(const RadialBernoulli<Scalar>& rb, Branch branch, Scalar x_abs) {
  using std::pow;
  const auto rho = rb.root(branch);
  if (!rho) throw std::invalid_argument("branch has no free-boundary radius");
  const Scalar slack = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * rb.R;
  if (x_abs < *rho - slack || x_abs > rb.R + slack)
    throw std::invalid_argument("radius outside [rho, R]");
  const Scalar ra = pow(*rho, rb.alpha);
  return (pow(x_abs, rb.alpha) - ra) / (pow(rb.R, rb.alpha) - ra);
}

/// |u'(rho) - lambda| for the profile with free boundary at rho.
template <class Scalar>
Scalar gradient_deviation(const RadialBernoulli<Scalar>& rb, Scalar rho) {
  using std::abs;
  using std::pow;
  return abs(rb.alpha * pow(rho, rb.alpha - 1) / (pow(rb.R, rb.alpha) - pow(rho, rb.alpha)) -
             rb.lambda);
}

template <class Scalar>
Scalar gradient_check(const RadialBernoulli<Scalar>& rb, Branch branch) {
  const auto rho = rb.root(branch);
  if (!rho) throw std::invalid_argument("branch has no free-boundary radius");
  return gradient_deviation(rb, *rho);
}

template <class Scalar = double>
struct SweepRow {
  Scalar p;
  std::optional<Scalar> rho_hyper, rho_ell;
  std::optional<Scalar> sup_diff;  // vs the limit profile max(0, 1 - lambda (R - r))
};

template <class Scalar = double>
struct SweepTable {
  std::vector<SweepRow<Scalar>> rows;
  Scalar threshold{};
  bool last_below = false;
};

/// Free-boundary radii and the sup distance of the elliptic profile to the
/// limit 1 - lambda (R - |x|), both extended by zero inside their free
/// boundaries, sampled at `samples` radii.
template <class Scalar>
SweepTable<Scalar> sweep_p(int n, Scalar R, Scalar lambda, const std::vector<Scalar>& ps,
                           Scalar threshold = Scalar(0.1), int samples = 10000) {
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  if (!(lambda * R > 1)) throw std::invalid_argument("sweep needs lambda > 1/R");
  for (std::size_t k = 0; k < ps.size(); ++k)
    if (!(ps[k] > Scalar(n)) || (k > 0 && !(ps[k] > ps[k - 1])))
      throw std::invalid_argument("p values must increase and exceed n");

  SweepTable<Scalar> table;
  table.threshold = threshold;
  const Scalar limit_rho = R - 1 / lambda;
  for (Scalar p : ps) {
    const auto rb = radial_solve(n, p, R, lambda);
    SweepRow<Scalar> row{p, rb.rho_hyper, rb.rho_ell, std::nullopt};
    if (rb.rho_ell) {
      const Scalar rho = *rb.rho_ell;
      const Scalar a = min(rho, limit_rho);
      const Scalar ra = pow(rho, rb.alpha), Ra = pow(R, rb.alpha);
      Scalar worst = 0;
      for (int s = 0; s < samples; ++s) {
        const Scalar r = a + (R - a) * Scalar(s) / Scalar(samples - 1);
        const Scalar up = r <= rho ? Scalar(0) : (pow(r, rb.alpha) - ra) / (Ra - ra);
        const Scalar w = max(Scalar(0), 1 - lambda * (R - r));
        worst = max(worst, abs(up - w));
      }
      row.sup_diff = worst;
    }
    table.rows.push_back(row);
  }
  table.last_below = !table.rows.empty() && table.rows.back().sup_diff &&
                     *table.rows.back().sup_diff <= threshold;
  return table;
}

template <class Scalar = double>
struct ConstantTable {
  std::vector<std::pair<Scalar, Scalar>> rows;  // (p, lambda_p)
  bool decreasing = true;
  Scalar final_gap{};  // lambda_p - 1/R at the last p
};

template <class Scalar>
ConstantTable<Scalar> bernoulli_constant_limit(int n, Scalar R, const std::vector<Scalar>& ps) {
  ConstantTable<Scalar> t;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (k > 0 && !(ps[k] > ps[k - 1])) throw std::invalid_argument("p values must increase");
    t.rows.emplace_back(ps[k], critical_lambda(n, ps[k], R));
    if (k > 0 && !(t.rows[k].second < t.rows[k - 1].second)) t.decreasing = false;
  }
  if (!t.rows.empty()) t.final_gap = t.rows.back().second - 1 / R;
  return t;
}

namespace detail {

inline std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class Scalar>
std::string csv_optional(const std::optional<Scalar>& x) {
  return x ? csv_number(double(*x)) : std::string();
}

}  // namespace detail

template <class Scalar>
void write_csv(std::ostream& os, const SweepTable<Scalar>& t) {
  os << "p,rho_hyper,rho_ell,sup_diff\n";
  for (const auto& r : t.rows)
    os << detail::csv_number(double(r.p)) << ',' << detail::csv_optional(r.rho_hyper) << ','
       << detail::csv_optional(r.rho_ell) << ',' << detail::csv_optional(r.sup_diff) << '\n';
}

template <class Scalar>
void write_csv(std::ostream& os, const ConstantTable<Scalar>& t) {
  os << "p,lambda_p\n";
  for (const auto& [p, l] : t.rows)
    os << detail::csv_number(double(p)) << ',' << detail::csv_number(double(l)) << '\n';
}

}  // namespace infbern

#endif  // INFBERN_RADIAL_HPP

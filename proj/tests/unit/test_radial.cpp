#include "infbern/radial.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace infbern;

namespace {

// With alpha = 1/2 and t = sqrt(rho), f = 0 reads 6t^2 - 6t + 1 = 0.
const double t_minus = (3 - std::sqrt(3.0)) / 6;
const double t_plus = (3 + std::sqrt(3.0)) / 6;

}  // namespace

TEST_SUITE("radial") {

TEST_CASE("roots for n=2, p=3, R=1, lambda=3") {
  const auto rb = radial_solve(2, 3.0, 1.0, 3.0);
  CHECK(rb.alpha == 0.5);
  CHECK(rb.lambda_p == doctest::Approx(2.0).epsilon(1e-15));
  REQUIRE(rb.has_roots());
  CHECK(std::abs(*rb.rho_hyper - t_minus * t_minus) <= 1e-12);
  CHECK(std::abs(*rb.rho_ell - t_plus * t_plus) <= 1e-12);
  CHECK(std::abs(f_alpha(rb, *rb.rho_hyper)) <= 1e-12);
  CHECK(std::abs(f_alpha(rb, *rb.rho_ell)) <= 1e-12);
  CHECK(0 < *rb.rho_hyper);
  CHECK(*rb.rho_hyper < rb.rho_star);
  CHECK(rb.rho_star < *rb.rho_ell);
  CHECK(*rb.rho_ell < rb.R);
}

TEST_CASE("below, at and above the critical constant") {
  const auto below = radial_solve(2, 3.0, 1.0, 1.9);
  CHECK_FALSE(below.has_roots());
  CHECK(below.m_alpha == doctest::Approx(std::sqrt(1.9 / 0.5) - 1.9));
  const auto at = radial_solve(2, 3.0, 1.0, 2.0);
  REQUIRE(at.has_roots());
  CHECK(std::abs(*at.rho_hyper - 0.25) <= 1e-8);
  CHECK(*at.rho_hyper == *at.rho_ell);
  CHECK(std::abs(f_alpha(at, 0.25)) <= 1e-12);
}

TEST_CASE("critical constant against m_alpha on a lattice") {
  for (int n : {2, 3})
    for (double p : {3.5, 5.0, 10.0, 40.0})
      for (double lambda : {0.6, 0.9, 1.1, 1.5, 2.5, 4.0}) {
        if (!(p > n)) continue;
        const auto rb = radial_solve(n, p, 1.0, lambda);
        CAPTURE(n);
        CAPTURE(p);
        CAPTURE(lambda);
        if (std::abs(lambda - rb.lambda_p) > 1e-9) CHECK((lambda >= rb.lambda_p) == (rb.m_alpha <= 0));
        if (rb.has_roots()) {
          CHECK(gradient_check(rb, Branch::hyper) <= 1e-10);
          CHECK(gradient_check(rb, Branch::ell) <= 1e-10);
        }
      }
}

TEST_CASE("m_alpha is the minimum of f on a fine grid") {
  const auto rb = radial_solve(2, 5.0, 1.0, 3.0);
  double m = INFINITY;
  for (int k = 1; k <= 10000; ++k) m = std::min(m, f_alpha(rb, k / 10000.0));
  CHECK(rb.m_alpha <= m + 1e-12);
  CHECK(rb.m_alpha == doctest::Approx(m).epsilon(1e-6));
}

TEST_CASE("profiles and the gradient condition") {
  const auto rb = radial_solve(2, 3.0, 1.0, 3.0);
  CHECK(radial_profile(rb, Branch::ell, 1.0) == doctest::Approx(1.0));
  CHECK(std::abs(radial_profile(rb, Branch::ell, *rb.rho_ell)) <= 1e-14);
  CHECK(std::abs(radial_profile(rb, Branch::hyper, *rb.rho_hyper)) <= 1e-14);
  CHECK(radial_profile(rb, Branch::ell, 0.81) == doctest::Approx((0.9 - t_plus) / (1 - t_plus)));
  CHECK(gradient_check(rb, Branch::hyper) <= 1e-10);
  CHECK(gradient_check(rb, Branch::ell) <= 1e-10);
  CHECK(gradient_deviation(rb, *rb.rho_ell + 1e-3) > 1e-6);
  CHECK_THROWS_AS(radial_profile(rb, Branch::ell, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(radial_solve(2, 2.0, 1.0, 3.0), std::invalid_argument);
}

TEST_CASE("sweep toward the infinity solution") {
  const auto t = sweep_p(2, 1.0, 3.0, std::vector<double>{5, 10, 20, 50, 100});
  REQUIRE(t.rows.size() == 5);
  const auto& last = t.rows.back();
  CHECK(*last.rho_hyper <= 0.01);
  CHECK(std::abs(*last.rho_ell - 2.0 / 3) <= 0.05);
  CHECK(*last.sup_diff <= 0.1);
  CHECK(t.last_below);
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    CHECK(*t.rows[k].rho_ell > *t.rows[k - 1].rho_ell);
    CHECK(*t.rows[k].rho_hyper < *t.rows[k - 1].rho_hyper);
  }
  std::ostringstream csv;
  write_csv(csv, t);
  CHECK(csv.str().rfind("p,rho_hyper,rho_ell,sup_diff\n", 0) == 0);
}

TEST_CASE("Bernoulli constants decrease to 1/R") {
  const auto t = bernoulli_constant_limit(2, 1.0, std::vector<double>{3, 5, 10, 20, 50, 100, 200});
  CHECK(t.rows.front().second == doctest::Approx(2.0));
  CHECK(t.rows.back().second == doctest::Approx(std::pow(1.0 / 199, -1.0 / 198)));
  CHECK(t.rows.back().second == doctest::Approx(1.0271).epsilon(1e-4));
  CHECK(t.decreasing);
  CHECK(t.final_gap <= 0.05);
  CHECK(critical_lambda(2, 1e7, 1.0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("long double instantiation") {
  const auto rb = radial_solve<long double>(2, 3.0L, 1.0L, 3.0L);
  const long double tp = (3 + std::sqrt(3.0L)) / 6;
  CHECK(double(std::abs(*rb.rho_ell - tp * tp)) <= 1e-15);
}

}

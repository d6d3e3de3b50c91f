#include "infbern/geometry.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace infbern;

namespace {

Domain named(const char* name) { return build_domain(*named_domain(name)); }

Grid grid_for(const Domain& d, double h) { return Grid::covering(d.bounding_box(), h); }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("point distances") {
  CHECK(named("ball").distance(Point(0, 0)) == doctest::Approx(1.0));
  CHECK(named("square").distance(Point(0.5, 0)) == doctest::Approx(1.5));
  CHECK(named("nonconn").distance(Point(0, 0)) == doctest::Approx(1.0));
  CHECK(named("ball").contains(Point(0.5, 0.5)));
  CHECK_FALSE(named("ball").contains(Point(0.8, 0.8)));
}

TEST_CASE("dumbbell distance matches brute force over boundary samples") {
  const auto prims = *named_domain("nonconn");
  const Domain dom = build_domain(prims);
  const auto samples = oracle::boundary_samples(prims, 1e-3);
  for (const Point x : {Point(0, 0), Point(-4, 0), Point(3.5, 0.5), Point(-1.2, -0.3),
                        Point(-6, 1.5), Point(1.9, 0.9)}) {
    CAPTURE(x.transpose());
    // Samples can miss a corner of the union by up to their spacing.
    CHECK(std::abs(dom.distance(x) - oracle::min_distance(samples, x)) <= 1e-3);
  }
}

TEST_CASE("inradius of the example domains") {
  const double h = 0.05;
  for (auto [name, R] : {std::pair{"ball", 1.0}, {"square", 2.0}, {"nonconn", 3.0}}) {
    const Domain dom = named(name);
    const Inradius r = inradius(distance_field(dom, grid_for(dom, h)));
    CAPTURE(name);
    CHECK(std::abs(r.value - R) <= h);
    CHECK(r.uncertainty <= h);
  }
  const Domain dumbbell = named("nonconn");
  const Inradius r = inradius(distance_field(dumbbell, grid_for(dumbbell, h)));
  CHECK(std::abs(std::abs(r.argmax.x()) - 4.0) <= h);
}

TEST_CASE("parallel masks and their components") {
  const double h = 0.05;
  {
    const Domain dom = named("ball");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    const CompactMask m = parallel_mask(d, 0.5, false);
    for (Index j = 0; j < d.grid.ny; ++j)
      for (Index i = 0; i < d.grid.nx; ++i) {
        const double r = d.grid.node(i, j).norm();
        if (std::abs(r - 0.5) > 1e-9) CHECK(m.member(i, j) == (r < 0.5));
      }
    CHECK(connected_components(m.member).count() == 1);
  }
  {
    const Domain dom = named("square");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    const CompactMask m = parallel_mask(d, 1.0, false);
    for (Index j = 0; j < d.grid.ny; ++j)
      for (Index i = 0; i < d.grid.nx; ++i) {
        const Point x = d.grid.node(i, j);
        if (std::abs(x.cwiseAbs().maxCoeff() - 1.0) > 1e-9)
          CHECK(m.member(i, j) == (x.cwiseAbs().maxCoeff() < 1.0));
      }
  }
  {
    const Domain dom = named("nonconn");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    CHECK(connected_components(parallel_mask(d, 1.0, false).member).count() == 2);
  }
  CHECK(connected_components(Mask::Constant(4, 4, false)).count() == 0);
}

TEST_CASE("H2 holds on convex domains and fails on the nonreg dumbbell") {
  const double h = 0.05;
  for (auto [name, r] : {std::pair{"square", 1.0}, {"ball", 0.5}}) {
    const Domain dom = named(name);
    CHECK(check_h2(distance_field(dom, grid_for(dom, h)), r, dom.tau_geom()).pass);
  }
  const Domain dom = named("nonreg");
  const ScalarField d = distance_field(dom, grid_for(dom, h));
  const H2Report rep = check_h2(d, 1.0, dom.tau_geom());
  REQUIRE_FALSE(rep.pass);
  for (Index k : rep.flagged) {
    const Point x = d.grid.node(k);
    CHECK(std::abs(x.y()) <= 2 * h);
    CHECK(x.x() >= 2 * std::sqrt(2.0) - 4 - h);
    CHECK(x.x() <= 4.0 + h);
  }
}

TEST_CASE("boundary projections") {
  auto close_to = [](const std::vector<Point>& ps, const Point& q) {
    return std::any_of(ps.begin(), ps.end(), [&](const Point& p) { return (p - q).norm() < 1e-9; });
  };
  const auto ball = named("ball").projections(Point(0.5, 0), 1e-9);
  REQUIRE(ball.size() == 1);
  CHECK(close_to(ball, Point(1, 0)));
  const auto centre = named("square").projections(Point(0, 0), 1e-9);
  CHECK(centre.size() == 4);
  for (const Point q : {Point(2, 0), Point(-2, 0), Point(0, 2), Point(0, -2)}) CHECK(close_to(centre, q));
  const auto side = named("square").projections(Point(1, 0), 1e-9);
  REQUIRE(side.size() == 1);
  CHECK(close_to(side, Point(2, 0)));
}

TEST_CASE("ray set of the parallel set") {
  const double h = 0.05;
  {
    const Domain dom = named("ball");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    const CompactMask hat = hat_d_mask(d, level_set_distance(d, 0.5), 0.5, 2 * h);
    for (Index j = 0; j < d.grid.ny; ++j)
      for (Index i = 0; i < d.grid.nx; ++i)
        if (d.inside(i, j) && d(i, j) < 0.5 - h) CHECK(hat.member(i, j));
  }
  {
    const Domain dom = named("square");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    const CompactMask hat = hat_d_mask(d, level_set_distance(d, 1.0), 1.0, 2 * h);
    const Eigen::Vector2i side = d.grid.nearest(Point(1.5, 0));
    const Eigen::Vector2i corner = d.grid.nearest(Point(1.5, 1.5));
    CHECK(hat.member(side.x(), side.y()));
    CHECK_FALSE(hat.member(corner.x(), corner.y()));
  }
  {
    const Domain dom = named("nonconn");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    // Rays from the axis plateau {d = 1} cover the strip; rays from the
    // boundary of {d > 1} do not reach its middle.
    const Eigen::Vector2i strip = d.grid.nearest(Point(0, 0.5));
    const CompactMask level_hat = hat_d_mask(d, level_set_distance(d, 1.0), 1.0, 2 * h);
    CHECK(level_hat.member(strip.x(), strip.y()));
    const Mask closure = parallel_closure_mask(d, 1.0, 1e-9).member;
    const CompactMask open_hat = hat_d_mask(d, level_set_distance(d, 1.0, &closure), 1.0, 2 * h);
    CHECK_FALSE(open_hat.member(strip.x(), strip.y()));
    const Eigen::Vector2i lens = d.grid.nearest(Point(-4, 2.5));
    CHECK(open_hat.member(lens.x(), lens.y()));
  }
}

TEST_CASE("distance to the boundary of the open parallel set skips plateaus") {
  const Domain dom = named("nonconn");
  const ScalarField d = distance_field(dom, grid_for(dom, 0.05));
  const Eigen::Vector2i n = d.grid.nearest(Point(0, 0.5));
  // {d = 1} contains the strip axis; the boundary of {d > 1} is the two lens
  // outlines, whose nearest point to (0, 0.5) is the tip p.
  CHECK(level_set_distance(d, 1.0)(n.x(), n.y()) <= 0.5 + 0.05);
  const double tip = (Point(0, 0.5) - Point(2 * std::sqrt(2.0) - 4, 0)).norm();
  const Mask closure = parallel_closure_mask(d, 1.0, 1e-9).member;
  // The grid closure reaches up to 3h along the plateau beyond the tip.
  CHECK(std::abs(level_set_distance(d, 1.0, &closure)(n.x(), n.y()) - tip) <= 4 * 0.05);

  // On the square the level curve runs through nodes; anchoring keeps all of it.
  const Domain sq = named("square");
  const ScalarField ds = distance_field(sq, grid_for(sq, 1.0 / 16));
  const Mask sq_closure = parallel_closure_mask(ds, 1.0, 1e-9).member;
  const ScalarField plain = level_set_distance(ds, 1.0);
  const ScalarField anchored = level_set_distance(ds, 1.0, &sq_closure);
  CHECK(((plain.values - anchored.values).abs() <= 1e-12 || !ds.inside).all());
}

TEST_CASE("cut locus") {
  const double h = 0.05;
  {
    const Domain dom = named("ball");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    const CompactMask cut = cutlocus_mask(dom, d);
    REQUIRE_FALSE(cut.empty());
    for (Index k = 0; k < d.grid.size(); ++k)
      if (cut.member.data()[k]) CHECK(d.grid.node(k).norm() <= 3 * std::sqrt(h));
  }
  {
    const Domain dom = named("square");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    const CompactMask cut = cutlocus_mask(dom, d);
    REQUIRE_FALSE(cut.empty());
    for (Index k = 0; k < d.grid.size(); ++k)
      if (cut.member.data()[k]) {
        const Point x = d.grid.node(k);
        CHECK(std::abs(std::abs(x.x()) - std::abs(x.y())) <= 3 * std::sqrt(h));
      }
    const Eigen::Vector2i diag = d.grid.nearest(Point(1, 1));
    CHECK(cut.member(diag.x(), diag.y()));
  }
  {
    const Domain dom = named("strip");
    const ScalarField d = distance_field(dom, grid_for(dom, h));
    const CompactMask cut = cutlocus_mask(dom, d);
    const Eigen::Vector2i mid = d.grid.nearest(Point(0, 0));
    CHECK(cut.member(mid.x(), mid.y()));
    const Eigen::Vector2i off = d.grid.nearest(Point(0, 0.5));
    CHECK_FALSE(cut.member(off.x(), off.y()));
  }
}

TEST_CASE("domain specs") {
  const DomainSpec spec = parse_domain_spec(
      R"({"primitives": [{"kind": "disk", "params": [0, 0, 1]}], "grid": {"h": 0.1}})");
  REQUIRE(spec.h);
  CHECK(*spec.h == 0.1);
  CHECK(build_domain(spec.primitives).distance(Point(0, 0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_domain_spec("{"), std::invalid_argument);
  CHECK_THROWS_AS(parse_domain_spec(R"({"primitives": [{"kind": "hex", "params": []}]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_domain(std::vector<Primitive>{Disk{Point(0, 0), -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_domain(std::vector<Primitive>{Disk{Point(0, 0), 1.0}, Disk{Point(5, 0), 1.0}}),
                  std::invalid_argument);
  const Domain dumbbell = named("nonconn");
  CHECK(count_inside_components(dumbbell, grid_for(dumbbell, 0.1)) == 1);
}

}

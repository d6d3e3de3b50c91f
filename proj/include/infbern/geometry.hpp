// Domains built as unions of disks and rectangles, with exact boundary
// geometry: distance to the boundary, projections, ray exits, and the grid
// sets derived from the distance function (parallel sets, ray sets, cut locus).
#ifndef INFBERN_GEOMETRY_HPP
#define INFBERN_GEOMETRY_HPP

#include "infbern/grid.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace infbern {

struct Disk {
  Point center;
  double radius;
};

struct Rect {
  Point lo;
  Point hi;
};

using Primitive = std::variant<Disk, Rect>;

/// A retained piece of a primitive boundary.
/// Segments are parametrized by t in [0,1] from a to b; arcs by angle.
struct BoundarySegment {
  Point a;
  Point b;
};

struct BoundaryArc {
  Point center;
  double radius;
  double theta0;  // counter-clockwise from theta0 to theta1, theta1 > theta0
  double theta1;
};

using BoundaryPiece = std::variant<BoundarySegment, BoundaryArc>;

/// Nearest point of a piece and its distance.
struct PieceProjection {
  Point point;
  double distance;
};

PieceProjection project(const BoundaryPiece& piece, const Point& x);

/// Sample points along a piece, spaced at most `spacing` apart (endpoints included).
std::vector<Point> sample(const BoundaryPiece& piece, double spacing);

/// Open, bounded union of primitives.
class Domain {
 public:
  explicit Domain(std::vector<Primitive> primitives);

  const std::vector<Primitive>& primitives() const { return primitives_; }
  const std::vector<BoundaryPiece>& boundary() const { return pieces_; }
  const Box& bounding_box() const { return box_; }
  double diameter() const { return box_.diameter(); }

  /// Tolerance for exact-geometry predicates, 1e-9 * diameter.
  double tau_geom() const { return 1e-9 * diameter(); }

  /// Point strictly inside some primitive.
  bool contains(const Point& x) const;

  /// dist(x, boundary) from the retained boundary pieces.
  double distance(const Point& x) const;

  /// Smallest t in (0, t_max] at which x + t * dir leaves the domain, or t_max
  /// if the segment stays inside. Requires contains(x).
  double exit_parameter(const Point& x, const Point& dir, double t_max) const;

  /// Boundary points within `tol` of the minimal distance, one per piece,
  /// merged when closer than `tol` to each other.
  std::vector<Point> projections(const Point& x, double tol) const;

 private:
  std::vector<Primitive> primitives_;
  std::vector<BoundaryPiece> pieces_;
  Box box_;
};

/// Domain plus grid parameters as read from a domain spec file.
struct DomainSpec {
  std::vector<Primitive> primitives;
  std::optional<double> h;
  int margin = 2;
};

/// Parses a JSON domain spec:
///   {"primitives": [{"kind": "disk", "params": [cx, cy, r]},
///                   {"kind": "rect", "params": [x0, y0, x1, y1]}],
///    "grid": {"h": 0.02, "margin": 2}}
DomainSpec parse_domain_spec(std::string_view text);

/// Validates the primitives and assembles the domain. Throws
/// std::invalid_argument on an empty list, a degenerate primitive, or
/// primitives whose union is not connected.
Domain build_domain(const std::vector<Primitive>& primitives);
Domain build_domain(std::string_view spec_text);

/// The example domains: "ball" (unit disk), "square" ((-2,2)^2), "strip"
/// ((-4,4)x(-1,1)), "nonconn" (two radius-3 disks joined by a strip),
/// "nonreg" (radius-3 and radius-1 disks joined by a strip).
std::optional<std::vector<Primitive>> named_domain(std::string_view name);

/// Inside mask of the domain on a grid; nodes on the boundary are outside.
Mask inside_mask(const Domain& domain, const Grid& grid);

/// d(x) = dist(x, boundary) on inside nodes, -dist(x, boundary) outside.
/// Throws std::invalid_argument if no node is inside.
ScalarField distance_field(const Domain& domain, const Grid& grid);

/// Inradius estimate: max of d over inside nodes; the true value lies within h above.
struct Inradius {
  double value;
  double uncertainty;
  Point argmax;
};
Inradius inradius(const ScalarField& d);

/// {d > r} (closed = false) or {d >= r - tol} (closed = true) among inside nodes.
/// `tol` defaults to the exact-geometry tolerance handed in by the caller.
CompactMask parallel_mask(const ScalarField& d, double r, bool closed, double tol = 0.0);

/// Grid closure of the open parallel set {d > r}: nodes of {d >= r - tol} lying
/// within c_h2 * h of a node of {d > r}. Equals the closed parallel mask
/// exactly when {d >= r} is the closure of {d > r}.
CompactMask parallel_closure_mask(const ScalarField& d, double r, double tol,
                                  double c_h2 = 3.0);

struct H2Report {
  bool pass;
  std::vector<Index> flagged;  // linear node indices
  double worst_distance;       // largest distance of a flagged node to {d > r}
  double threshold;
};

/// Flags nodes with d >= r whose distance to the open mask {d > r} exceeds c_h2 * h.
H2Report check_h2(const ScalarField& d, double r, double tol, double c_h2 = 3.0);

/// dist(x, {d = r}) for every node, from the piecewise-linear level curve of d.
/// With `anchor`, only cells with a corner in the anchor mask where d >= r
/// contribute. Anchored at the grid closure of {d > r} the result is the
/// distance to the boundary of the open parallel set, which leaves out
/// plateaus of {d = r} such as the axis of a strip.
ScalarField level_set_distance(const ScalarField& d, double r, const Mask* anchor = nullptr);

/// Nodes x with d(x) < r and |d(x) + dist(x, {d = r}) - r| <= tau_ray: the grid
/// trace of the union of open segments joining {d = r} to boundary projections.
CompactMask hat_d_mask(const ScalarField& d, const ScalarField& level_dist, double r,
                       double tau_ray);

/// Grid approximation of the cut locus: nodes whose boundary projections
/// (within tau_proj) spread more than tau_proj apart, or whose centred
/// gradient magnitude of d drops below 1 - c_sigma * sqrt(h).
CompactMask cutlocus_mask(const Domain& domain, const ScalarField& d, double c_sigma = 1.0);

/// Number of 4-connected components of the inside mask.
std::size_t count_inside_components(const Domain& domain, const Grid& grid);

}  // namespace infbern

#endif  // INFBERN_GEOMETRY_HPP

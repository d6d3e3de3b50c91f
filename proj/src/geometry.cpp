#include "infbern/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace infbern {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool strictly_inside(const Primitive& prim, const Point& x) {
  return std::visit(overloaded{
                        [&](const Disk& d) { return (x - d.center).norm() < d.radius; },
                        [&](const Rect& r) {
                          return (x.array() > r.lo.array()).all() &&
                                 (x.array() < r.hi.array()).all();
                        },
                    },
                    prim);
}

Box primitive_box(const Primitive& prim) {
  return std::visit(overloaded{
                        [](const Disk& d) {
                          const Point e = Point::Constant(d.radius);
                          return Box{d.center - e, d.center + e};
                        },
                        [](const Rect& r) { return Box{r.lo, r.hi}; },
                    },
                    prim);
}

// Parameters t where the line p + t * v meets the boundary of `prim`
// (circle, or the four supporting lines of a rectangle).
void line_breakpoints(const Primitive& prim, const Point& p, const Point& v,
                      std::vector<double>& out) {
  std::visit(overloaded{
                 [&](const Disk& d) {
                   const Point w = p - d.center;
                   const double a = v.squaredNorm();
                   const double b = 2.0 * w.dot(v);
                   const double c = w.squaredNorm() - d.radius * d.radius;
                   const double disc = b * b - 4 * a * c;
                   if (disc < 0) return;
                   const double s = std::sqrt(disc);
                   out.push_back((-b - s) / (2 * a));
                   out.push_back((-b + s) / (2 * a));
                 },
                 [&](const Rect& r) {
                   for (int axis = 0; axis < 2; ++axis) {
                     if (v[axis] == 0.0) continue;
                     out.push_back((r.lo[axis] - p[axis]) / v[axis]);
                     out.push_back((r.hi[axis] - p[axis]) / v[axis]);
                   }
                 },
             },
             prim);
}

// Angles where the circle (c, rad) meets the boundary of `prim`.
void circle_breakpoints(const Point& c, double rad, const Primitive& prim,
                        std::vector<double>& out) {
  std::visit(overloaded{
                 [&](const Disk& d) {
                   const Point w = d.center - c;
                   const double dist = w.norm();
                   if (dist == 0.0 || dist > rad + d.radius || dist < std::abs(rad - d.radius))
                     return;
                   const double base = std::atan2(w.y(), w.x());
                   const double cosv =
                       std::clamp((rad * rad + dist * dist - d.radius * d.radius) /
                                      (2 * rad * dist),
                                  -1.0, 1.0);
                   const double off = std::acos(cosv);
                   out.push_back(base - off);
                   out.push_back(base + off);
                 },
                 [&](const Rect& r) {
                   for (int axis = 0; axis < 2; ++axis)
                     for (double line : {r.lo[axis], r.hi[axis]}) {
                       const double s = (line - c[axis]) / rad;
                       if (std::abs(s) > 1.0) continue;
                       // axis 0: cos(theta) = s ; axis 1: sin(theta) = s
                       if (axis == 0) {
                         const double th = std::acos(s);
                         out.push_back(th);
                         out.push_back(-th);
                       } else {
                         const double th = std::asin(s);
                         out.push_back(th);
                         out.push_back(std::numbers::pi - th);
                       }
                     }
                 },
             },
             prim);
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

bool retained(const std::vector<Primitive>& prims, std::size_t self, const Point& x) {
  for (std::size_t k = 0; k < prims.size(); ++k)
    if (k != self && strictly_inside(prims[k], x)) return false;
  return true;
}

void trim_circle(const std::vector<Primitive>& prims, std::size_t self, const Disk& disk,
                 std::vector<BoundaryPiece>& out) {
  std::vector<double> cuts;
  for (std::size_t k = 0; k < prims.size(); ++k)
    if (k != self) circle_breakpoints(disk.center, disk.radius, prims[k], cuts);
  for (double& c : cuts) c = wrap_angle(c);
  cuts.push_back(0.0);
  cuts.push_back(kTwoPi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-14; }),
             cuts.end());

  std::vector<std::pair<double, double>> keep;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    const Point m = disk.center + disk.radius * Point(std::cos(mid), std::sin(mid));
    if (!retained(prims, self, m)) continue;
    if (!keep.empty() && std::abs(keep.back().second - cuts[k]) < 1e-14)
      keep.back().second = cuts[k + 1];
    else
      keep.emplace_back(cuts[k], cuts[k + 1]);
  }
  // Join an arc running through angle 0.
  if (keep.size() > 1 && keep.front().first == 0.0 && keep.back().second == kTwoPi) {
    keep.front().first = keep.back().first - kTwoPi;
    keep.pop_back();
  }
  for (const auto& [a, b] : keep) out.emplace_back(BoundaryArc{disk.center, disk.radius, a, b});
}

void trim_segment(const std::vector<Primitive>& prims, std::size_t self, const Point& a,
                  const Point& b, std::vector<BoundaryPiece>& out) {
  std::vector<double> cuts;
  const Point v = b - a;
  for (std::size_t k = 0; k < prims.size(); ++k)
    if (k != self) line_breakpoints(prims[k], a, v, cuts);
  std::erase_if(cuts, [](double t) { return !(t > 0.0 && t < 1.0); });
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-14; }),
             cuts.end());
  std::vector<std::pair<double, double>> keep;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Point m = a + 0.5 * (cuts[k] + cuts[k + 1]) * v;
    if (!retained(prims, self, m)) continue;
    if (!keep.empty() && keep.back().second == cuts[k])
      keep.back().second = cuts[k + 1];
    else
      keep.emplace_back(cuts[k], cuts[k + 1]);
  }
  for (const auto& [s, t] : keep) out.emplace_back(BoundarySegment{a + s * v, a + t * v});
}

bool angle_in_arc(double phi, const BoundaryArc& arc) {
  const double rel = wrap_angle(phi - arc.theta0);
  return rel <= arc.theta1 - arc.theta0;
}

Point arc_point(const BoundaryArc& arc, double theta) {
  return arc.center + arc.radius * Point(std::cos(theta), std::sin(theta));
}

bool closures_meet(const Primitive& p, const Primitive& q) {
  auto box_dist = [](const Rect& r, const Point& x) {
    const Point c = x.cwiseMax(r.lo).cwiseMin(r.hi);
    return (x - c).norm();
  };
  return std::visit(
      overloaded{
          [](const Disk& a, const Disk& b) {
            return (a.center - b.center).norm() <= a.radius + b.radius;
          },
          [&](const Disk& a, const Rect& b) { return box_dist(b, a.center) <= a.radius; },
          [&](const Rect& a, const Disk& b) { return box_dist(a, b.center) <= b.radius; },
          [](const Rect& a, const Rect& b) {
            return (a.lo.array() <= b.hi.array()).all() && (b.lo.array() <= a.hi.array()).all();
          },
      },
      p, q);
}

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point v = b - a;
  const double len2 = v.squaredNorm();
  const double t = len2 > 0 ? std::clamp((x - a).dot(v) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + t * v)).norm();
}

}  // namespace

PieceProjection project(const BoundaryPiece& piece, const Point& x) {
  return std::visit(
      overloaded{
          [&](const BoundarySegment& s) {
            const Point v = s.b - s.a;
            const double len2 = v.squaredNorm();
            const double t = len2 > 0 ? std::clamp((x - s.a).dot(v) / len2, 0.0, 1.0) : 0.0;
            const Point p = s.a + t * v;
            return PieceProjection{p, (x - p).norm()};
          },
          [&](const BoundaryArc& arc) {
            const Point w = x - arc.center;
            const double rho = w.norm();
            if (rho == 0.0) {
              return PieceProjection{arc_point(arc, arc.theta0), arc.radius};
            }
            const double phi = std::atan2(w.y(), w.x());
            if (angle_in_arc(phi, arc)) {
              const Point p = arc.center + (arc.radius / rho) * w;
              return PieceProjection{p, std::abs(rho - arc.radius)};
            }
            const Point p0 = arc_point(arc, arc.theta0);
            const Point p1 = arc_point(arc, arc.theta1);
            const double d0 = (x - p0).norm(), d1 = (x - p1).norm();
            return d0 <= d1 ? PieceProjection{p0, d0} : PieceProjection{p1, d1};
          },
      },
      piece);
}

std::vector<Point> sample(const BoundaryPiece& piece, double spacing) {
  std::vector<Point> pts;
  std::visit(overloaded{
                 [&](const BoundarySegment& s) {
                   const int n = std::max(1, int(std::ceil((s.b - s.a).norm() / spacing)));
                   for (int k = 0; k <= n; ++k) pts.push_back(s.a + (double(k) / n) * (s.b - s.a));
                 },
                 [&](const BoundaryArc& arc) {
                   const double len = arc.radius * (arc.theta1 - arc.theta0);
                   const int n = std::max(1, int(std::ceil(len / spacing)));
                   for (int k = 0; k <= n; ++k)
                     pts.push_back(
                         arc_point(arc, arc.theta0 + (double(k) / n) * (arc.theta1 - arc.theta0)));
                 },
             },
             piece);
  return pts;
}

Domain::Domain(std::vector<Primitive> primitives) : primitives_(std::move(primitives)) {
  box_ = primitive_box(primitives_.front());
  for (const auto& p : primitives_) {
    const Box b = primitive_box(p);
    box_.lo = box_.lo.cwiseMin(b.lo);
    box_.hi = box_.hi.cwiseMax(b.hi);
  }
  for (std::size_t k = 0; k < primitives_.size(); ++k) {
    std::visit(overloaded{
                   [&](const Disk& d) { trim_circle(primitives_, k, d, pieces_); },
                   [&](const Rect& r) {
                     const Point c00 = r.lo, c11 = r.hi;
                     const Point c10(r.hi.x(), r.lo.y()), c01(r.lo.x(), r.hi.y());
                     trim_segment(primitives_, k, c00, c10, pieces_);
                     trim_segment(primitives_, k, c10, c11, pieces_);
                     trim_segment(primitives_, k, c11, c01, pieces_);
                     trim_segment(primitives_, k, c01, c00, pieces_);
                   },
               },
               primitives_[k]);
  }
}

bool Domain::contains(const Point& x) const {
  return std::any_of(primitives_.begin(), primitives_.end(),
                     [&](const Primitive& p) { return strictly_inside(p, x); });
}

double Domain::distance(const Point& x) const {
  double best = kInf;
  for (const auto& piece : pieces_) best = std::min(best, project(piece, x).distance);
  return best;
}

double Domain::exit_parameter(const Point& x, const Point& dir, double t_max) const {
  struct Interval {
    double a, b;
  };
  std::vector<Interval> spans;
  spans.reserve(primitives_.size());
  for (const auto& prim : primitives_) {
    std::visit(overloaded{
                   [&](const Disk& d) {
                     const Point w = x - d.center;
                     const double a = dir.squaredNorm();
                     const double b = 2.0 * w.dot(dir);
                     const double c = w.squaredNorm() - d.radius * d.radius;
                     const double disc = b * b - 4 * a * c;
                     if (disc <= 0) return;
                     const double s = std::sqrt(disc);
                     // Stable roots.
                     const double q = -0.5 * (b + std::copysign(s, b));
                     double t0 = q / a, t1 = c / q;
                     if (q == 0.0) t0 = t1 = 0.0;
                     if (t0 > t1) std::swap(t0, t1);
                     spans.push_back({t0, t1});
                   },
                   [&](const Rect& r) {
                     double lo = -kInf, hi = kInf;
                     for (int axis = 0; axis < 2; ++axis) {
                       if (dir[axis] == 0.0) {
                         if (!(x[axis] > r.lo[axis] && x[axis] < r.hi[axis])) return;
                         continue;
                       }
                       double t0 = (r.lo[axis] - x[axis]) / dir[axis];
                       double t1 = (r.hi[axis] - x[axis]) / dir[axis];
                       if (t0 > t1) std::swap(t0, t1);
                       lo = std::max(lo, t0);
                       hi = std::min(hi, t1);
                     }
                     if (lo < hi) spans.push_back({lo, hi});
                   },
               },
               prim);
  }
  double cur = 0.0;
  bool extended = true;
  while (extended && cur < t_max) {
    extended = false;
    for (const auto& s : spans) {
      if (s.a < cur && s.b > cur) {
        cur = s.b;
        extended = true;
      }
    }
  }
  return std::min(cur, t_max);
}

std::vector<Point> Domain::projections(const Point& x, double tol) const {
  std::vector<PieceProjection> cand;
  double dmin = kInf;
  for (const auto& piece : pieces_) {
    cand.push_back(project(piece, x));
    dmin = std::min(dmin, cand.back().distance);
  }
  std::vector<Point> out;
  auto add = [&](const Point& p) {
    for (const auto& q : out)
      if ((q - p).norm() <= tol) return;
    out.push_back(p);
  };
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (cand[k].distance > dmin + tol) continue;
    add(cand[k].point);
    // At the centre of an arc every arc point is a projection.
    if (const auto* arc = std::get_if<BoundaryArc>(&pieces_[k]);
        arc && (x - arc->center).norm() <= tau_geom()) {
      for (int q = 1; q <= 4; ++q)
        add(arc_point(*arc, arc->theta0 + 0.25 * q * (arc->theta1 - arc->theta0)));
    }
  }
  return out;
}

DomainSpec parse_domain_spec(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed domain spec: ") + e.what());
  }
  DomainSpec spec;
  if (!j.contains("primitives") || !j["primitives"].is_array())
    throw std::invalid_argument("domain spec needs a 'primitives' array");
  for (const auto& p : j["primitives"]) {
    const auto kind = p.value("kind", std::string{});
    const auto params = p.value("params", std::vector<double>{});
    if (kind == "disk") {
      if (params.size() != 3) throw std::invalid_argument("disk needs params [cx, cy, r]");
      spec.primitives.emplace_back(Disk{Point(params[0], params[1]), params[2]});
    } else if (kind == "rect") {
      if (params.size() != 4) throw std::invalid_argument("rect needs params [x0, y0, x1, y1]");
      spec.primitives.emplace_back(Rect{Point(params[0], params[1]), Point(params[2], params[3])});
    } else {
      throw std::invalid_argument("unknown primitive kind '" + kind + "'");
    }
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("h")) spec.h = g["h"].get<double>();
    spec.margin = g.value("margin", 2);
  }
  return spec;
}

Domain build_domain(const std::vector<Primitive>& primitives) {
  if (primitives.empty()) throw std::invalid_argument("domain needs at least one primitive");
  for (const auto& p : primitives) {
    std::visit(overloaded{
                   [](const Disk& d) {
                     if (!(d.radius > 0.0) || !d.center.allFinite())
                       throw std::invalid_argument("degenerate disk (radius must be > 0)");
                   },
                   [](const Rect& r) {
                     if (!((r.hi.array() > r.lo.array()).all()) || !r.lo.allFinite() ||
                         !r.hi.allFinite())
                       throw std::invalid_argument("degenerate rectangle (need lo < hi)");
                   },
               },
               p);
  }
  // Union must be connected: the overlap graph of closures has one component.
  std::vector<int> comp(primitives.size(), -1);
  std::vector<std::size_t> stack{0};
  comp[0] = 0;
  while (!stack.empty()) {
    const auto k = stack.back();
    stack.pop_back();
    for (std::size_t m = 0; m < primitives.size(); ++m)
      if (comp[m] < 0 && closures_meet(primitives[k], primitives[m])) {
        comp[m] = 0;
        stack.push_back(m);
      }
  }
  if (std::any_of(comp.begin(), comp.end(), [](int c) { return c < 0; }))
    throw std::invalid_argument("primitives do not form a connected union");
  return Domain(primitives);
}

Domain build_domain(std::string_view spec_text) {
  return build_domain(parse_domain_spec(spec_text).primitives);
}

std::optional<std::vector<Primitive>> named_domain(std::string_view name) {
  using P = std::vector<Primitive>;
  if (name == "ball") return P{Disk{Point(0, 0), 1.0}};
  if (name == "square") return P{Rect{Point(-2, -2), Point(2, 2)}};
  if (name == "strip") return P{Rect{Point(-4, -1), Point(4, 1)}};
  if (name == "nonconn")
    return P{Disk{Point(-4, 0), 3.0}, Disk{Point(4, 0), 3.0}, Rect{Point(-4, -1), Point(4, 1)}};
  if (name == "nonreg")
    return P{Disk{Point(-4, 0), 3.0}, Disk{Point(4, 0), 1.0}, Rect{Point(-4, -1), Point(4, 1)}};
  return std::nullopt;
}

Mask inside_mask(const Domain& domain, const Grid& grid) {
  Mask m(grid.nx, grid.ny);
  for (Index j = 0; j < grid.ny; ++j)
    for (Index i = 0; i < grid.nx; ++i) m(i, j) = domain.contains(grid.node(i, j));
  return m;
}

ScalarField distance_field(const Domain& domain, const Grid& grid) {
  ScalarField d(grid, inside_mask(domain, grid), "distance");
  if (!d.inside.any()) throw std::invalid_argument("grid too coarse: no node inside the domain");
  for (Index j = 0; j < grid.ny; ++j)
    for (Index i = 0; i < grid.nx; ++i) {
      const double dist = domain.distance(grid.node(i, j));
      d(i, j) = d.inside(i, j) ? dist : -dist;
    }
  return d;
}

Inradius inradius(const ScalarField& d) {
  Inradius r{-kInf, d.grid.h, Point::Zero()};
  for (Index j = 0; j < d.grid.ny; ++j)
    for (Index i = 0; i < d.grid.nx; ++i)
      if (d.inside(i, j) && d(i, j) > r.value) {
        r.value = d(i, j);
        r.argmax = d.grid.node(i, j);
      }
  return r;
}

CompactMask parallel_mask(const ScalarField& d, double r, bool closed, double tol) {
  if (r < 0.0) throw std::invalid_argument("parallel set radius must be >= 0");
  const double top = inradius(d).value;
  if (closed ? r > top + d.grid.h : r >= top + d.grid.h)
    throw std::invalid_argument("parallel set radius exceeds the inradius");
  CompactMask m(d.grid);
  if (closed) {
    m.member = d.inside && (d.values >= r - tol);
  } else {
    m.member = d.inside && (d.values > r);
  }
  return m;
}

CompactMask parallel_closure_mask(const ScalarField& d, double r, double tol, double c_h2) {
  const CompactMask open = parallel_mask(d, r, false);
  const CompactMask closed = parallel_mask(d, r, true, tol);
  const Eigen::ArrayXXd to_open = distance_to_mask(open.member, d.grid.h);
  CompactMask m(d.grid);
  m.member = closed.member && (to_open <= c_h2 * d.grid.h);
  return m;
}

H2Report check_h2(const ScalarField& d, double r, double tol, double c_h2) {
  const CompactMask open = parallel_mask(d, r, false);
  const Eigen::ArrayXXd to_open = distance_to_mask(open.member, d.grid.h);
  H2Report rep{true, {}, 0.0, c_h2 * d.grid.h};
  for (Index j = 0; j < d.grid.ny; ++j)
    for (Index i = 0; i < d.grid.nx; ++i) {
      if (!d.inside(i, j) || d(i, j) < r - tol) continue;
      if (to_open(i, j) > rep.threshold) {
        rep.flagged.push_back(d.grid.linear(i, j));
        rep.worst_distance = std::max(rep.worst_distance, std::min(to_open(i, j), 1e300));
      }
    }
  rep.pass = rep.flagged.empty();
  return rep;
}

ScalarField level_set_distance(const ScalarField& d, double r, const Mask* anchor) {
  const Grid& g = d.grid;
  // Marching squares on s = d - r, "in" where s >= 0.
  std::vector<BoundarySegment> segs;
  auto cross = [&](Index i0, Index j0, Index i1, Index j1) {
    const double s0 = d(i0, j0) - r, s1 = d(i1, j1) - r;
    const double t = s0 / (s0 - s1);
    return Point(g.node(i0, j0) + t * (g.node(i1, j1) - g.node(i0, j0)));
  };
  for (Index j = 0; j + 1 < g.ny; ++j)
    for (Index i = 0; i + 1 < g.nx; ++i) {
      const Index ci[4] = {i, i + 1, i + 1, i};
      const Index cj[4] = {j, j, j + 1, j + 1};
      bool in[4];
      int n_in = 0;
      for (int c = 0; c < 4; ++c) {
        in[c] = d(ci[c], cj[c]) - r >= 0.0;
        n_in += in[c];
      }
      if (n_in == 0 || n_in == 4) continue;
      if (anchor) {
        bool anchored = false;
        for (int c = 0; c < 4; ++c) anchored = anchored || (in[c] && (*anchor)(ci[c], cj[c]));
        if (!anchored) continue;
      }
      std::vector<Point> pts;
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if (in[a] != in[b]) pts.push_back(cross(ci[a], cj[a], ci[b], cj[b]));
      }
      if (pts.size() == 2) {
        segs.push_back({pts[0], pts[1]});
      } else if (pts.size() == 4) {
        // Saddle: edges are (01,12,23,30); pair by the sign of the cell average.
        double avg = 0;
        for (int c = 0; c < 4; ++c) avg += d(ci[c], cj[c]) - r;
        const bool centre_in = avg >= 0.0;
        if (centre_in == in[0]) {
          segs.push_back({pts[0], pts[1]});
          segs.push_back({pts[2], pts[3]});
        } else {
          segs.push_back({pts[3], pts[0]});
          segs.push_back({pts[1], pts[2]});
        }
      }
    }

  ScalarField out(g, d.inside, "level_set_distance");
  if (segs.empty()) {
    out.values.setConstant(kInf);
    return out;
  }
  // Bucket the segments to keep the nearest-segment search local.
  const double cell = 8.0 * g.h;
  Box bb{segs.front().a, segs.front().a};
  for (const auto& s : segs) {
    bb.lo = bb.lo.cwiseMin(s.a).cwiseMin(s.b);
    bb.hi = bb.hi.cwiseMax(s.a).cwiseMax(s.b);
  }
  const Index bx = Index(std::floor(bb.extent().x() / cell)) + 1;
  const Index by = Index(std::floor(bb.extent().y() / cell)) + 1;
  std::vector<std::vector<int>> buckets(bx * by);
  auto bucket_of = [&](const Point& p) {
    const Index a = std::clamp<Index>(Index(std::floor((p.x() - bb.lo.x()) / cell)), 0, bx - 1);
    const Index b = std::clamp<Index>(Index(std::floor((p.y() - bb.lo.y()) / cell)), 0, by - 1);
    return std::pair<Index, Index>{a, b};
  };
  for (int s = 0; s < int(segs.size()); ++s) {
    // Segments are shorter than a grid diagonal, so registering both ends suffices.
    const auto [a0, b0] = bucket_of(segs[s].a);
    const auto [a1, b1] = bucket_of(segs[s].b);
    buckets[a0 + bx * b0].push_back(s);
    if (a1 != a0 || b1 != b0) buckets[a1 + bx * b1].push_back(s);
  }
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      const Point x = g.node(i, j);
      // Distance from x to the bucket box, as a lower bound.
      const double ox = std::max({bb.lo.x() - x.x(), x.x() - bb.hi.x(), 0.0});
      const double oy = std::max({bb.lo.y() - x.y(), x.y() - bb.hi.y(), 0.0});
      const double outside = std::hypot(ox, oy);
      const auto [ca, cb] = bucket_of(x);
      double best = kInf;
      for (Index ring = 0;; ++ring) {
        // Segments not yet examined have both ends in rings >= ring, so every
        // point of them lies in rings >= ring - 1.
        const double reach = outside + (double(ring) - 2.0) * cell;
        if (best <= reach) break;
        if (ring > bx + by) break;
        for (Index a = ca - ring; a <= ca + ring; ++a)
          for (Index b = cb - ring; b <= cb + ring; ++b) {
            if (std::max(std::abs(a - ca), std::abs(b - cb)) != ring) continue;
            if (a < 0 || b < 0 || a >= bx || b >= by) continue;
            for (int s : buckets[a + bx * b])
              best = std::min(best, point_segment_distance(x, segs[s].a, segs[s].b));
          }
      }
      out(i, j) = best;
    }
  return out;
}

CompactMask hat_d_mask(const ScalarField& d, const ScalarField& level_dist, double r,
                       double tau_ray) {
  CompactMask m(d.grid);
  m.member = d.inside && (d.values < r) &&
             ((d.values + level_dist.values - r).abs() <= tau_ray);
  return m;
}

CompactMask cutlocus_mask(const Domain& domain, const ScalarField& d, double c_sigma) {
  const Grid& g = d.grid;
  const double tau_proj = 2.0 * g.h;
  const double grad_floor = 1.0 - c_sigma * std::sqrt(g.h);
  CompactMask m(g);
  for (Index j = 1; j + 1 < g.ny; ++j)
    for (Index i = 1; i + 1 < g.nx; ++i) {
      if (!d.inside(i, j)) continue;
      const double gx = (d(i + 1, j) - d(i - 1, j)) / (2 * g.h);
      const double gy = (d(i, j + 1) - d(i, j - 1)) / (2 * g.h);
      if (std::hypot(gx, gy) < grad_floor) {
        m.member(i, j) = true;
        continue;
      }
      const auto proj = domain.projections(g.node(i, j), tau_proj);
      double diam = 0;
      for (std::size_t a = 0; a < proj.size(); ++a)
        for (std::size_t b = a + 1; b < proj.size(); ++b)
          diam = std::max(diam, (proj[a] - proj[b]).norm());
      m.member(i, j) = diam > tau_proj;
    }
  return m;
}

std::size_t count_inside_components(const Domain& domain, const Grid& grid) {
  return connected_components(inside_mask(domain, grid)).count();
}

}  // namespace infbern

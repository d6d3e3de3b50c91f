// Structural properties of infinity-harmonic functions, checked on grid fields.
#ifndef INFBERN_VERIFICATION_HPP
#define INFBERN_VERIFICATION_HPP

#include "infbern/infinity_solver.hpp"
#include "infbern/report.hpp"

#include <cstdint>
#include <vector>

namespace infbern {

/// Random node boxes inside `region` and random cones a + b|x - x0| that
/// dominate u on the box boundary and at the vertex; reports the largest
/// amount by which u (and -u) exceeds such a cone inside the box.
/// Default tolerance: 5h times the range of u over the region.
VerificationReport verify_cone_comparison(const ScalarField& u, const Mask& region, int trials,
                                          std::uint64_t seed,
                                          std::optional<double> tolerance = {});
VerificationReport verify_cone_comparison(const Potential& p, int trials, std::uint64_t seed);

/// At nodes whose circle of radius `radius_cells` * h lies in `region`, the
/// upwind gradient must not exceed the largest rise or fall over the circle
/// (divided by the radius), nor the gradient at the point of largest rise.
VerificationReport verify_slope_estimates(const ScalarField& u, const DiscreteStencil& stencil,
                                          const Mask& region,
                                          std::optional<double> tolerance = {},
                                          double radius_cells = 3.0);
VerificationReport verify_slope_estimates(const Potential& p);

/// w_K(x0) >= exp(-L / delta) for a polyline from x0 to the boundary, L its
/// length and delta its distance to K. Throws std::invalid_argument when the
/// polyline touches K. Default tolerance 5h.
VerificationReport verify_harnack(const Potential& p, const Point& x0,
                                  const std::vector<Point>& polyline,
                                  std::optional<double> tolerance = {});

/// On segments [y, z] with y on the boundary, z in K and |y - z| = dist(boundary, K),
/// w_K matches 1 - |x - y| / |y - z|. Pairs within `pair_slack` of the minimum
/// count as minimizing. Throws std::invalid_argument if none is found.
VerificationReport verify_affine_on_rays(const Potential& p, const Domain& domain, double tol,
                                         std::optional<double> pair_slack = {},
                                         int max_pairs = 64, int samples_per_ray = 20);

/// Largest |u_1 - u_2| over nodes where both are inside.
double sup_difference(const ScalarField& a, const ScalarField& b);

}  // namespace infbern

#endif  // INFBERN_VERIFICATION_HPP

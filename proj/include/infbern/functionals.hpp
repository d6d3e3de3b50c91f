// The energies J_p and their limit J_inf evaluated on grid fields.
#ifndef INFBERN_FUNCTIONALS_HPP
#define INFBERN_FUNCTIONALS_HPP

#include "infbern/infinity_solver.hpp"
#include "infbern/report.hpp"

namespace infbern {

/// Positive set and upwind gradient of a field over its inside nodes.
struct EnergyData {
  Mask positive;            // inside nodes with u > tau_zero
  Eigen::ArrayXXd gradient;  // upwind, over the stencil restricted to inside nodes
  double cell_area;

  EnergyData(const ScalarField& u, double tau_zero, StencilConfig config = {});
};

/// (1/p) sum (|grad u| / lambda)^p h^2 + ((p - 1)/p) h^2 #{u > tau_zero}.
/// The gradient term runs over the positive set only, which keeps the
/// quadrature nondecreasing in p node by node.
double J_p_evaluate(const EnergyData& e, double lambda, double p);
double J_p_evaluate(const ScalarField& u, double lambda, double p, double tau_zero = 1e-7);

/// h^2 #{u > tau_zero} when the upwind gradient stays below lambda + tau_grad
/// on the positive set, +infinity otherwise.
double J_inf_evaluate(const EnergyData& e, double lambda, double tau_grad);
double J_inf_evaluate(const ScalarField& u, double lambda, double tau_grad,
                      double tau_zero = 1e-7);

/// J_p(u) <= J_q(u) + 1e-12 for p <= q.
VerificationReport verify_monotone_in_p(const EnergyData& e, double lambda, double p, double q);
VerificationReport verify_monotone_in_p(const ScalarField& u, double lambda, double p, double q,
                                        double tau_zero = 1e-7);

}  // namespace infbern

#endif  // INFBERN_FUNCTIONALS_HPP

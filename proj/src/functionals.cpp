#include "infbern/functionals.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace infbern {

EnergyData::EnergyData(const ScalarField& u, double tau_zero, StencilConfig config)
    : positive(u.inside && (u.values > tau_zero)),
      gradient(upwind_gradient(u, *support_stencil(u, config))),
      cell_area(u.grid.h * u.grid.h) {}

double J_p_evaluate(const EnergyData& e, double lambda, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("J_p needs p >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  double integral = 0.0;
  Index count = 0;
  for (Index k = 0; k < e.positive.size(); ++k) {
    if (!e.positive.data()[k]) continue;
    integral += std::pow(e.gradient.data()[k] / lambda, p);
    ++count;
  }
  return e.cell_area * (integral / p + (p - 1.0) / p * double(count));
}

double J_p_evaluate(const ScalarField& u, double lambda, double p, double tau_zero) {
  return J_p_evaluate(EnergyData(u, tau_zero), lambda, p);
}

double J_inf_evaluate(const EnergyData& e, double lambda, double tau_grad) {
  Index count = 0;
  for (Index k = 0; k < e.positive.size(); ++k) {
    if (!e.positive.data()[k]) continue;
    if (e.gradient.data()[k] > lambda + tau_grad) return std::numeric_limits<double>::infinity();
    ++count;
  }
  return e.cell_area * double(count);
}

double J_inf_evaluate(const ScalarField& u, double lambda, double tau_grad, double tau_zero) {
  return J_inf_evaluate(EnergyData(u, tau_zero), lambda, tau_grad);
}

VerificationReport verify_monotone_in_p(const EnergyData& e, double lambda, double p, double q) {
  if (!(p > 1.0) || !(p <= q)) throw std::invalid_argument("need 1 < p <= q");
  const double jp = J_p_evaluate(e, lambda, p);
  const double jq = J_p_evaluate(e, lambda, q);
  std::ostringstream note;
  note.precision(17);
  note << "J_p=" << jp << " J_q=" << jq << " p=" << p << " q=" << q;
  return VerificationReport::make("monotone_in_p", jp - jq, 1e-12, {},
                                  "p -> J_p(u) is nondecreasing", note.str());
}

VerificationReport verify_monotone_in_p(const ScalarField& u, double lambda, double p, double q,
                                        double tau_zero) {
  return verify_monotone_in_p(EnergyData(u, tau_zero), lambda, p, q);
}

}  // namespace infbern

#pragma once

#include "robustpr/ensemble.hpp"

namespace robustpr {

struct HuberParams {
  double alpha = 1.345;
  void validate() const;
};

/// F(x) = f(x) + lambda ||x||_{1/2}^{1/2} with f the mean Huber loss of the
/// quadratic residuals |<a_i, x>|^2 - b_i.
struct ObjectiveParams {
  HuberParams huber;
  double lambda = 1e-3;
  void validate() const;
};

/// u^2/2 for |u| <= alpha, alpha |u| - alpha^2/2 otherwise.
double huber(double u, double alpha);
/// Clamp of u to [-alpha, alpha]; returns +-alpha exactly at |u| = alpha.
double huber_deriv(double u, double alpha);

/// sum_j |x_j|^{1/2}, with |.| the complex modulus.
double half_norm(const Signal& x);

double loss(const Signal& x, const MeasurementEnsemble& e, double alpha);
double objective(const Signal& x, const MeasurementEnsemble& e, const ObjectiveParams& params);

/// F_tau(x, y) = f(y) + 2 Re<g(y), x - y> + ||x - y||^2 / (2 tau) + lambda ||x||_{1/2}^{1/2}.
/// F_tau(x, x) = F(x); it majorizes F near the level set for small tau.
double surrogate(const Signal& x, const Signal& y, const MeasurementEnsemble& e, const ObjectiveParams& params,
                 double tau);

}  // namespace robustpr

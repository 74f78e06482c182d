#include "robustpr/objective.hpp"

#include <cmath>

#include "robustpr/detail/kernels.hpp"
#include "robustpr/errors.hpp"
#include "robustpr/gradient.hpp"

namespace robustpr {

void HuberParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("huber alpha must be > 0");
}

void ObjectiveParams::validate() const {
  huber.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be > 0");
}

double huber(double u, double alpha) { return detail::huber(u, alpha); }

double huber_deriv(double u, double alpha) { return detail::huber_deriv(u, alpha); }

double half_norm(const Signal& x) {
  return visit(x, [](const auto& v) { return detail::half_norm(v); });
}

double loss(const Signal& x, const MeasurementEnsemble& e, double alpha) {
  HuberParams{alpha}.validate();
  return visit(e, x, [&](const auto& a, const auto& v) {
    return detail::loss_from_projection(detail::project(a, v), e.observations(), alpha);
  });
}

double objective(const Signal& x, const MeasurementEnsemble& e, const ObjectiveParams& params) {
  // lambda = 0 gives the smooth part alone.
  params.huber.validate();
  if (!(params.lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  return loss(x, e, params.huber.alpha) + params.lambda * half_norm(x);
}

double surrogate(const Signal& x, const Signal& y, const MeasurementEnsemble& e, const ObjectiveParams& params,
                 double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
  if (x.field() != y.field() || x.size() != y.size()) throw InvalidArgument("x and y must share field and length");
  params.huber.validate();
  if (!(params.lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  e.check_compatible(y);
  const Signal gy = g(y, e, params.huber.alpha);
  const ComplexVector diff = x.as_complex() - y.as_complex();
  const double linear = 2.0 * gy.as_complex().dot(diff).real();  // Eigen dot conjugates the left operand
  return loss(y, e, params.huber.alpha) + linear + diff.squaredNorm() / (2.0 * tau) + params.lambda * half_norm(x);
}

}  // namespace robustpr

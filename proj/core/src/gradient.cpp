#include "robustpr/gradient.hpp"

#include "robustpr/detail/kernels.hpp"
#include "robustpr/errors.hpp"

namespace robustpr {

Signal g(const Signal& x, const MeasurementEnsemble& e, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("huber alpha must be > 0");
  return visit(e, x, [&](const auto& a, const auto& v) {
    return Signal(detail::gradient_from_projection(a, detail::project(a, v), e.observations(), alpha));
  });
}

RealVector realify(const ComplexVector& x) {
  RealVector out(2 * x.size());
  out.head(x.size()) = x.real();
  out.tail(x.size()) = x.imag();
  return out;
}

ComplexVector complexify(const RealVector& x_tilde) {
  if (x_tilde.size() % 2 != 0) throw InvalidArgument("realified vector must have even length");
  const Index p = x_tilde.size() / 2;
  ComplexVector out(p);
  for (Index j = 0; j < p; ++j) out[j] = {x_tilde[j], x_tilde[p + j]};
  return out;
}

RealMatrix realify_quadratic(const ComplexVector& a) {
  const Index p = a.size();
  RealVector w1(2 * p), w2(2 * p);
  w1 << a.real(), a.imag();
  w2 << -a.imag(), a.real();
  RealMatrix out = w1 * w1.transpose() + w2 * w2.transpose();
  return out;
}

double realified_loss(const RealVector& x_tilde, const MeasurementEnsemble& e, double alpha) {
  if (e.field() != FieldTag::Complex) throw InvalidArgument("realified loss needs a complex ensemble");
  if (x_tilde.size() != 2 * e.p()) throw InvalidArgument("realified vector must have length 2p");
  const auto& sampling = e.sampling<Complex>();
  double sum = 0.0;
  for (Index i = 0; i < e.n(); ++i) {
    const RealMatrix quad = realify_quadratic(sampling.row(i).transpose());
    const double value = x_tilde.dot(quad * x_tilde);
    sum += detail::huber(value - e.observations()[i], alpha);
  }
  return sum / static_cast<double>(e.n());
}

RealVector realify_gradient(const Signal& x, const MeasurementEnsemble& e, double alpha) {
  if (x.is_real()) throw InvalidArgument("realify_gradient needs a complex signal");
  const Signal gx = g(x, e, alpha);
  return 2.0 * realify(gx.complex_values());
}

}  // namespace robustpr

#include "robustpr/metrics.hpp"

#include "robustpr/errors.hpp"

namespace robustpr {

namespace {

void check_pair(const Signal& x_hat, const Signal& x_true) {
  if (x_hat.field() != x_true.field() || x_hat.size() != x_true.size())
    throw InvalidArgument("relative_error needs signals of equal field and length");
  if (x_true.norm() == 0.0) throw InvalidArgument("relative_error needs a nonzero reference signal");
}

}  // namespace

Signal align_phase(const Signal& x_hat, const Signal& x_true) {
  check_pair(x_hat, x_true);
  if (x_hat.is_real()) {
    const RealVector& est = x_hat.real_values();
    const RealVector& ref = x_true.real_values();
    return (est - ref).norm() <= (est + ref).norm() ? x_hat : Signal(RealVector(-est));
  }
  const ComplexVector& est = x_hat.complex_values();
  const Complex c = est.dot(x_true.complex_values());  // x_hat^H x_true
  if (std::abs(c) == 0.0) return x_hat;
  // ||x_hat - w x|| = ||conj(w) x_hat - x|| for |w| = 1, with w = conj(c)/|c|.
  return Signal(ComplexVector(est * (c / std::abs(c))));
}

double relative_error(const Signal& x_hat, const Signal& x_true) {
  const Signal aligned = align_phase(x_hat, x_true);
  return (aligned.as_complex() - x_true.as_complex()).norm() / x_true.norm();
}

}  // namespace robustpr

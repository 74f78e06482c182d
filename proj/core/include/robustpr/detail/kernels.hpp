#pragma once

// Field-generic kernels behind the Signal-level API. Everything here works
// on the projection z = conj(A) x, i.e. z_i = <a_i, x> = a_i^H x, so one
// matrix-vector product serves both the loss and the gradient.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>

#include "robustpr/signal.hpp"

namespace robustpr::detail {

template <class Scalar>
inline double abs2(const Scalar& v) {
  if constexpr (std::is_same_v<Scalar, double>)
    return v * v;
  else
    return std::norm(v);
}

template <class Scalar>
inline double modulus(const Scalar& v) {
  return std::abs(v);
}

inline double huber(double u, double alpha) {
  const double a = std::abs(u);
  return a <= alpha ? 0.5 * u * u : alpha * a - 0.5 * alpha * alpha;
}

inline double huber_deriv(double u, double alpha) { return std::clamp(u, -alpha, alpha); }

template <class Scalar>
Vec<Scalar> project(const Mat<Scalar>& sampling, const Vec<Scalar>& x) {
  return sampling.conjugate() * x;
}

/// (1/n) sum_i h_alpha(|z_i|^2 - b_i), summed in index order.
template <class Scalar>
double loss_from_projection(const Vec<Scalar>& z, const RealVector& b, double alpha) {
  double sum = 0.0;
  for (Index i = 0; i < z.size(); ++i) sum += huber(abs2(z[i]) - b[i], alpha);
  return sum / static_cast<double>(z.size());
}

/// g = (1/n) sum_i h'_alpha(|z_i|^2 - b_i) z_i a_i = A^T w / n.
template <class Scalar>
Vec<Scalar> gradient_from_projection(const Mat<Scalar>& sampling, const Vec<Scalar>& z, const RealVector& b,
                                     double alpha) {
  Vec<Scalar> w(z.size());
  for (Index i = 0; i < z.size(); ++i) w[i] = huber_deriv(abs2(z[i]) - b[i], alpha) * z[i];
  return (sampling.transpose() * w) / static_cast<double>(z.size());
}

template <class Scalar>
double half_norm(const Vec<Scalar>& x) {
  double sum = 0.0;
  for (Index j = 0; j < x.size(); ++j) sum += std::sqrt(modulus(x[j]));
  return sum;
}

/// Threshold below which the half-thresholding map returns zero:
/// (54^{1/3} / 4) mu^{2/3}.
inline double half_threshold_level(double mu) { return std::cbrt(54.0) / 4.0 * std::pow(mu, 2.0 / 3.0); }

/// Minimizer of |v - t|^2 + mu |v|^{1/2}; the tie at the threshold maps to 0.
template <class Scalar>
Scalar chi(const Scalar& t, double mu) {
  const double mag = modulus(t);
  if (!(mag > half_threshold_level(mu))) return Scalar(0);
  const double arg = std::clamp(mu / 8.0 * std::pow(mag / 3.0, -1.5), 0.0, 1.0);
  const double phi = std::acos(arg);
  const double shrink = 2.0 / 3.0 * (1.0 + std::cos(2.0 * std::numbers::pi / 3.0 - 2.0 / 3.0 * phi));
  return t * shrink;
}

template <class Scalar>
Vec<Scalar> half_threshold(const Vec<Scalar>& xi, double mu) {
  Vec<Scalar> out(xi.size());
  for (Index j = 0; j < xi.size(); ++j) out[j] = chi(xi[j], mu);
  return out;
}

template <class Scalar>
Index support_size(const Vec<Scalar>& x) {
  Index count = 0;
  for (Index j = 0; j < x.size(); ++j) count += x[j] != Scalar(0);
  return count;
}

}  // namespace robustpr::detail

#pragma once

#include "robustpr/ensemble.hpp"

namespace robustpr {

/// g(x) = (1/n) sum_i h'_alpha(|<a_i, x>|^2 - b_i) <a_i, x> a_i with
/// <a, x> = a^H x. Real field: grad f = 2 g. Complex field: g is the
/// Wirtinger gradient d f / d conj(x), and the steepest-ascent direction.
Signal g(const Signal& x, const MeasurementEnsemble& e, double alpha);

/// x~ = [Re x; Im x] (length 2p) and its inverse.
RealVector realify(const ComplexVector& x);
ComplexVector complexify(const RealVector& x_tilde);

/// Symmetric 2p x 2p matrix A with x~^T A x~ = |<a, x>|^2 for all x.
/// With a = c + i d: A = w1 w1^T + w2 w2^T, w1 = [c; d], w2 = [-d; c].
RealMatrix realify_quadratic(const ComplexVector& a);

/// f~(x~) = (1/n) sum_i h_alpha(x~^T A_i x~ - b_i) for a complex ensemble.
double realified_loss(const RealVector& x_tilde, const MeasurementEnsemble& e, double alpha);

/// Gradient of f~ with respect to x~: 2 [Re g(x); Im g(x)].
/// Throws InvalidArgument for real signals.
RealVector realify_gradient(const Signal& x, const MeasurementEnsemble& e, double alpha);

}  // namespace robustpr

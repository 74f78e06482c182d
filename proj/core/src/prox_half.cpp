#include "robustpr/prox_half.hpp"

#include <cmath>

#include "robustpr/detail/kernels.hpp"
#include "robustpr/errors.hpp"

namespace robustpr {

namespace {

void check_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("half-threshold weight mu must be > 0");
}

// Grid minimizer of phi(r) = (r - mag)^2 + mu sqrt(r) over r = k h, k = 0..K.
// phi'' = 2 - (mu/4) r^{-3/2}, so phi is concave on [0, r_c] and convex on
// [r_c, inf) with r_c = (mu/8)^{2/3}. A concave stretch attains its grid
// minimum at an end point, and a convex sequence is unimodal, so scanning
// the end points plus a coarse-then-fine pass over the convex stretch
// returns the same index as the full scan.
double oracle_magnitude(double mag, double mu, double grid_step) {
  if (!(grid_step > 0.0)) throw InvalidArgument("grid_step must be > 0");
  check_mu(mu);
  const auto phi = [&](long long k) {
    const double r = static_cast<double>(k) * grid_step;
    return (r - mag) * (r - mag) + mu * std::sqrt(r);
  };
  const auto last = static_cast<long long>(std::ceil(2.0 * mag / grid_step));
  long long best = 0;
  double best_value = phi(0);
  const auto consider = [&](long long k) {
    if (k < 0 || k > last) return;
    const double value = phi(k);
    if (value < best_value || (value == best_value && k < best)) {
      best_value = value;
      best = k;
    }
  };
  const auto bend = static_cast<long long>(std::floor(std::pow(mu / 8.0, 2.0 / 3.0) / grid_step));
  consider(bend);
  consider(bend + 1);
  const long long lo = std::max(bend + 1, 0LL);
  if (lo <= last) {
    const long long stride = std::max(1LL, (last - lo) / 4096);
    long long coarse = lo;
    double coarse_value = phi(lo);
    for (long long k = lo; k <= last; k += stride) {
      const double value = phi(k);
      if (value < coarse_value) {
        coarse_value = value;
        coarse = k;
      }
    }
    for (long long k = std::max(lo, coarse - stride); k <= std::min(last, coarse + stride); ++k) consider(k);
  }
  return static_cast<double>(best) * grid_step;
}

}  // namespace

void HalfThresholdParams::validate() const { check_mu(mu); }

double HalfThresholdParams::threshold() const { return detail::half_threshold_level(mu); }

double chi(double t, double mu) {
  check_mu(mu);
  return detail::chi(t, mu);
}

Complex chi(Complex t, double mu) {
  check_mu(mu);
  return detail::chi(t, mu);
}

Signal half_threshold(const Signal& xi, double mu) {
  check_mu(mu);
  return visit(xi, [&](const auto& v) { return Signal(detail::half_threshold(v, mu)); });
}

double chi_oracle(double t, double mu, double grid_step) {
  if (t == 0.0) return 0.0;
  const double r = oracle_magnitude(std::abs(t), mu, grid_step);
  return t > 0 ? r : -r;
}

Complex chi_oracle(Complex t, double mu, double grid_step) {
  const double mag = std::abs(t);
  if (mag == 0.0) return 0.0;
  return t / mag * oracle_magnitude(mag, mu, grid_step);
}

}  // namespace robustpr

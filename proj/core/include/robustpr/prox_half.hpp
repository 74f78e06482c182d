#pragma once

#include "robustpr/signal.hpp"

namespace robustpr {

/// Weight mu of the l_{1/2} term in  min_v ||v - xi||^2 + mu ||v||_{1/2}^{1/2}.
struct HalfThresholdParams {
  double mu = 1.0;
  void validate() const;
  /// (54^{1/3} / 4) mu^{2/3}: inputs with |t| at or below this map to zero.
  double threshold() const;
};

/// Scalar half-thresholding map. For complex t the result is a nonnegative
/// real multiple of t, so the phase is preserved.
double chi(double t, double mu);
Complex chi(Complex t, double mu);

/// Componentwise chi: a global minimizer of ||v - xi||^2 + mu ||v||_{1/2}^{1/2}.
Signal half_threshold(const Signal& xi, double mu);

/// Brute-force minimizer of |v - t|^2 + mu |v|^{1/2} over v = r t/|t| with
/// r on the grid {0, h, 2h, ...} covering [0, 2|t|]. The objective depends on
/// v only through |v| and Re(conj(v) t), so phase alignment with t is optimal
/// and the 1-D search is exhaustive up to the grid. Ties keep the smaller r.
double chi_oracle(double t, double mu, double grid_step);
Complex chi_oracle(Complex t, double mu, double grid_step);

}  // namespace robustpr

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robustpr/ensemble.hpp"

namespace robustpr {

/// Sampled estimates of the ensemble stability constants
///   mu_hat = min (1/n) sum_i |u^T a_i a_i^T v|
///   c2_hat = min (1/n) sum_{i in I0} (u^T a_i a_i^T v)^2,  I0 = {i : |eps_i| <= rho0 alpha}
/// over unit u, v. A sampled minimum can only miss worse directions, so both
/// numbers are upper bounds on the true infima.
struct StabilityEstimate {
  double mu_hat = 0.0;
  double c2_hat = 0.0;
  int samples = 0;
  double inlier_threshold = 0.0;  ///< rho0 * alpha
  Index inlier_count = 0;
  bool inliers_from_noise_record = false;  ///< false: no noise record, all rows used
  bool rows_normalized = true;
};

struct StabilityOptions {
  int samples = 2000;
  double rho0 = 0.5;
  double alpha = 1.345;
  std::uint64_t seed = 0;
  /// Rescale rows to unit norm before estimating (the setting the stability
  /// theory assumes). Off: use the raw sampling vectors.
  bool normalize_rows = true;
  int refine_sweeps = 200;
};

/// Random unit pairs followed by coordinate-descent refinement from the worst
/// pair. Real ensembles only (UnsupportedField otherwise).
StabilityEstimate estimate_stability(const MeasurementEnsemble& e, const StabilityOptions& options);

/// Spectral-gap condition for a linear rate at x*:
///   lambda_min(sum_{inliers} H_i) >= 3 sum_{boundary} ||H_i||_2 + regularizer term
/// Real:    H_i = (1/n)(3 <a_i, x*>^2 - b_i) a_{i,G} a_{i,G}^T,  term (3 lambda / 4) max_{j in G} |x*_j|^{-3/2}
/// Complex: H_i = (1/n)(2 A_i x~ x~^T A_i + (x~^T A_i x~ - b_i) A_i) on G~ = G u (p + G),
///          term (3 lambda / 2) max_{j in G} |x*_j|^{-3/2}
/// with inliers |r_i| <= alpha - eps1 and boundary ||r_i| - alpha| < eps1.
struct CertificateReport {
  FieldTag field = FieldTag::Real;
  std::vector<Index> support;
  std::vector<Index> realified_support;  ///< complex only
  double lambda = 0.0;
  double alpha = 0.0;
  double eps1 = 0.0;
  Index inlier_count = 0;
  Index boundary_count = 0;
  double lhs_min_eig = 0.0;
  RealVector lhs_eigenvector;  ///< unit eigenvector for lhs_min_eig
  double rhs_boundary_norms = 0.0;
  double rhs_reg_term = 0.0;
  bool passed = false;

  /// Re-derives the verdict from the numeric fields.
  bool verdict() const { return lhs_min_eig >= rhs_boundary_norms + rhs_reg_term; }
};

/// eps1 must lie in (0, alpha); x_star needs a nonempty support.
CertificateReport linear_rate_certificate(const Signal& x_star, const MeasurementEnsemble& e, double lambda,
                                          double alpha, double eps1);

/// The default eps1 = (1 - rho0) alpha.
inline double default_eps1(double alpha, double rho0 = 0.5) { return (1.0 - rho0) * alpha; }

/// Spectral norms showing why the real-case condition is reasonable near
/// the truth: the noise-weighted sums over the inlier and boundary sets,
/// and lambda_min of (2/n) sum_{inliers} <a_i, x>^2 a_{i,G} a_{i,G}^T.
struct Remark5Report {
  std::vector<Index> support;
  double eps1 = 0.0;
  Index inlier_count = 0;
  Index boundary_count = 0;
  double inlier_noise_norm = 0.0;
  double boundary_noise_norm = 0.0;
  double quadratic_min_eig = 0.0;
};

/// Real ensembles with a noise record (MissingData otherwise).
Remark5Report remark5_quantities(const Signal& x, const MeasurementEnsemble& e, double alpha, double rho0);

/// Evaluates the side conditions of the consistency bound for given constants.
/// Report only; the inequalities are not checked anywhere else.
struct ConsistencyAdvice {
  double t_n = 0.0;
  double alpha_min = 0.0;
  bool alpha_ok = false;
  double rho0_max = 0.0;
  bool rho0_ok = false;
  double min_entry_required = 0.0;
  bool min_entry_ok = false;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  bool lambda_ok = false;
};

ConsistencyAdvice consistency_advisor(Index n, const Signal& x_true, double mean_abs_noise, double c1, double c2,
                                      double rho0, double alpha, double lambda);

std::string to_json(const StabilityEstimate& s);
std::string to_json(const CertificateReport& r);
std::string to_json(const Remark5Report& r);
std::string to_json(const ConsistencyAdvice& a);

}  // namespace robustpr

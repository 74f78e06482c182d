#include "robustpr/diagnostics.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "robustpr/detail/json_convert.hpp"
#include "robustpr/errors.hpp"
#include "robustpr/gradient.hpp"
#include "robustpr/linalg.hpp"
#include "robustpr/objective.hpp"
#include "robustpr/random.hpp"

namespace robustpr {

namespace {

// Bilinear-form statistics over rows, with the projections Au, Av cached so a
// coordinate move costs O(n).
class PairObjective {
 public:
  PairObjective(const RealMatrix& rows, const std::vector<Index>& subset, bool squared)
      : rows_(rows), subset_(subset), squared_(squared) {}

  double operator()(const RealVector& au, double u_norm, const RealVector& av, double v_norm) const {
    double sum = 0.0;
    for (Index i : subset_) {
      const double form = au[i] * av[i] / (u_norm * v_norm);
      sum += squared_ ? form * form : std::abs(form);
    }
    return sum / static_cast<double>(rows_.rows());
  }

  const RealMatrix& rows() const { return rows_; }

 private:
  const RealMatrix& rows_;
  const std::vector<Index>& subset_;
  bool squared_;
};

struct Pair {
  RealVector u, v;
};

RealVector random_unit(Rng& rng, Index p) {
  RealVector u(p);
  for (Index j = 0; j < p; ++j) u[j] = rng.normal();
  return u / u.norm();
}

// Coordinate descent on (u, v): each coordinate tries +-h and zero, keeps the
// best improvement; h halves after a sweep without progress.
double refine(const PairObjective& objective, Pair pair, int sweeps) {
  const RealMatrix& a = objective.rows();
  RealVector au = a * pair.u, av = a * pair.v;
  double best = objective(au, pair.u.norm(), av, pair.v.norm());
  double h = 0.5;
  for (int sweep = 0; sweep < sweeps && h > 1e-7; ++sweep) {
    bool improved = false;
    for (int which = 0; which < 2; ++which) {
      RealVector& w = which == 0 ? pair.u : pair.v;
      RealVector& aw = which == 0 ? au : av;
      for (Index j = 0; j < w.size(); ++j) {
        const double moves[3] = {h, -h, -w[j]};
        double best_move = 0.0;
        for (double d : moves) {
          if (d == 0.0) continue;
          RealVector trial_w = w;
          trial_w[j] += d;
          const double len = trial_w.norm();
          if (len == 0.0) continue;
          const RealVector trial_aw = aw + d * a.col(j);
          const double value = which == 0 ? objective(trial_aw, len, av, pair.v.norm())
                                          : objective(au, pair.u.norm(), trial_aw, len);
          if (value < best) {
            best = value;
            best_move = d;
          }
        }
        if (best_move != 0.0) {
          w[j] += best_move;
          aw += best_move * a.col(j);
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return best;
}

double sampled_minimum(const PairObjective& objective, Index p, int samples, int sweeps, std::uint64_t seed) {
  Rng rng(seed);
  const RealMatrix& a = objective.rows();
  double best = std::numeric_limits<double>::infinity();
  Pair worst;
  for (int s = 0; s < samples; ++s) {
    RealVector u = random_unit(rng, p);
    RealVector v = random_unit(rng, p);
    const double value = objective(a * u, 1.0, a * v, 1.0);
    if (value < best) {
      best = value;
      worst = {std::move(u), std::move(v)};
    }
  }
  return std::min(best, refine(objective, worst, sweeps));
}

RealVector restrict(const auto& row, const std::vector<Index>& support) {
  RealVector out(static_cast<Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) out[static_cast<Index>(k)] = row[support[k]];
  return out;
}

double reg_term_max(const ComplexVector& x, const std::vector<Index>& support) {
  double worst = 0.0;
  for (Index j : support) worst = std::max(worst, std::pow(std::abs(x[j]), -1.5));
  return worst;
}

void check_certificate_args(const Signal& x, double lambda, double alpha, double eps1) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (!(eps1 > 0.0 && eps1 < alpha)) throw InvalidArgument("eps1 must lie in (0, alpha)");
  if (x.support_size() == 0) throw InvalidArgument("certificate needs a nonempty support");
}

CertificateReport real_certificate(const RealVector& x, const MeasurementEnsemble& e, double lambda, double alpha,
                                   double eps1) {
  const auto& sampling = e.sampling<double>();
  const RealVector& b = e.observations();
  const double n = static_cast<double>(e.n());
  CertificateReport report;
  report.field = FieldTag::Real;
  report.support = Signal(x).support();
  const auto m = static_cast<Index>(report.support.size());

  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(m, m);
  const RealVector z = sampling * x;
  for (Index i = 0; i < e.n(); ++i) {
    const double residual = z[i] * z[i] - b[i];
    const bool inlier = std::abs(residual) <= alpha - eps1;
    const bool boundary = std::abs(std::abs(residual) - alpha) < eps1;
    if (!inlier && !boundary) continue;
    const RealVector a_sub = restrict(sampling.row(i), report.support);
    const double coef = (3.0 * z[i] * z[i] - b[i]) / n;
    if (inlier) {
      lhs.noalias() += coef * a_sub * a_sub.transpose();
      ++report.inlier_count;
    }
    if (boundary) {
      // Rank one: ||coef a a^T||_2 = |coef| ||a||^2.
      report.rhs_boundary_norms += 3.0 * std::abs(coef) * a_sub.squaredNorm();
      ++report.boundary_count;
    }
  }
  const SymmetricEigen eig = jacobi_eigen(lhs);
  report.lhs_min_eig = eig.values[0];
  report.lhs_eigenvector = eig.vectors.col(0);
  report.rhs_reg_term = 0.75 * lambda * reg_term_max(x.cast<Complex>(), report.support);
  return report;
}

CertificateReport complex_certificate(const ComplexVector& x, const MeasurementEnsemble& e, double lambda,
                                      double alpha, double eps1) {
  const auto& sampling = e.sampling<Complex>();
  const RealVector& b = e.observations();
  const double n = static_cast<double>(e.n());
  const Index p = e.p();
  CertificateReport report;
  report.field = FieldTag::Complex;
  report.support = Signal(x).support();
  for (Index j : report.support) report.realified_support.push_back(j);
  for (Index j : report.support) report.realified_support.push_back(p + j);
  const auto m = static_cast<Index>(report.realified_support.size());

  const RealVector x_tilde = restrict(realify(x), report.realified_support);
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(m, m);
  for (Index i = 0; i < e.n(); ++i) {
    const RealMatrix full = realify_quadratic(sampling.row(i).transpose());
    Eigen::MatrixXd quad(m, m);
    for (Index r = 0; r < m; ++r)
      for (Index c = 0; c < m; ++c)
        quad(r, c) = full(report.realified_support[static_cast<std::size_t>(r)],
                          report.realified_support[static_cast<std::size_t>(c)]);
    const RealVector y = quad * x_tilde;
    const double residual = x_tilde.dot(y) - b[i];
    const bool inlier = std::abs(residual) <= alpha - eps1;
    const bool boundary = std::abs(std::abs(residual) - alpha) < eps1;
    if (!inlier && !boundary) continue;
    const Eigen::MatrixXd h = (2.0 * y * y.transpose() + residual * quad) / n;
    if (inlier) {
      lhs += h;
      ++report.inlier_count;
    }
    if (boundary) {
      report.rhs_boundary_norms += 3.0 * symmetric_spectral_norm(h);
      ++report.boundary_count;
    }
  }
  const SymmetricEigen eig = jacobi_eigen(lhs);
  report.lhs_min_eig = eig.values[0];
  report.lhs_eigenvector = eig.vectors.col(0);
  report.rhs_reg_term = 1.5 * lambda * reg_term_max(x, report.support);
  return report;
}

}  // namespace

StabilityEstimate estimate_stability(const MeasurementEnsemble& e, const StabilityOptions& options) {
  if (e.field() != FieldTag::Real) throw UnsupportedField("stability estimation is defined for real ensembles only");
  if (options.samples < 1) throw InvalidArgument("samples must be >= 1");
  if (!(options.rho0 > 0.0 && options.rho0 < 1.0)) throw InvalidArgument("rho0 must lie in (0, 1)");
  if (!(options.alpha > 0.0)) throw InvalidArgument("alpha must be > 0");

  RealMatrix rows = e.sampling<double>();
  if (options.normalize_rows)
    for (Index i = 0; i < rows.rows(); ++i) {
      const double len = rows.row(i).norm();
      if (len > 0.0) rows.row(i) /= len;
    }

  StabilityEstimate out;
  out.samples = options.samples;
  out.rows_normalized = options.normalize_rows;
  out.inlier_threshold = options.rho0 * options.alpha;

  std::vector<Index> all(static_cast<std::size_t>(e.n()));
  for (Index i = 0; i < e.n(); ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<Index> inliers;
  if (e.noise_record()) {
    out.inliers_from_noise_record = true;
    for (Index i = 0; i < e.n(); ++i)
      if (std::abs((*e.noise_record())[i]) <= out.inlier_threshold) inliers.push_back(i);
  } else {
    inliers = all;
  }
  out.inlier_count = static_cast<Index>(inliers.size());

  out.mu_hat = sampled_minimum(PairObjective(rows, all, false), e.p(), options.samples, options.refine_sweeps,
                               derive_stream(options.seed, 11));
  out.c2_hat = inliers.empty() ? 0.0
                               : sampled_minimum(PairObjective(rows, inliers, true), e.p(), options.samples,
                                                 options.refine_sweeps, derive_stream(options.seed, 12));
  return out;
}

CertificateReport linear_rate_certificate(const Signal& x_star, const MeasurementEnsemble& e, double lambda,
                                          double alpha, double eps1) {
  e.check_compatible(x_star);
  check_certificate_args(x_star, lambda, alpha, eps1);
  CertificateReport report = x_star.is_real()
                                 ? real_certificate(x_star.real_values(), e, lambda, alpha, eps1)
                                 : complex_certificate(x_star.complex_values(), e, lambda, alpha, eps1);
  report.lambda = lambda;
  report.alpha = alpha;
  report.eps1 = eps1;
  report.passed = report.verdict();
  return report;
}

Remark5Report remark5_quantities(const Signal& x, const MeasurementEnsemble& e, double alpha, double rho0) {
  e.check_compatible(x);
  if (e.field() != FieldTag::Real) throw UnsupportedField("remark5 quantities are defined for real ensembles only");
  if (!e.noise_record()) throw MissingData("remark5 quantities need the instance noise record (eps)");
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
  if (!(rho0 > 0.0 && rho0 < 1.0)) throw InvalidArgument("rho0 must lie in (0, 1)");
  if (x.support_size() == 0) throw InvalidArgument("remark5 quantities need a nonempty support");

  Remark5Report out;
  out.support = x.support();
  out.eps1 = default_eps1(alpha, rho0);
  const auto m = static_cast<Index>(out.support.size());
  const auto& sampling = e.sampling<double>();
  const RealVector& eps = *e.noise_record();
  const RealVector z = sampling * x.real_values();
  const double n = static_cast<double>(e.n());

  Eigen::MatrixXd inlier_noise = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd boundary_noise = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd quadratic = Eigen::MatrixXd::Zero(m, m);
  for (Index i = 0; i < e.n(); ++i) {
    const bool inlier = std::abs(eps[i]) <= alpha - out.eps1;
    const bool boundary = std::abs(std::abs(eps[i]) - alpha) < out.eps1;
    if (!inlier && !boundary) continue;
    const RealVector a_sub = restrict(sampling.row(i), out.support);
    const Eigen::MatrixXd outer = a_sub * a_sub.transpose();
    if (inlier) {
      inlier_noise += eps[i] / n * outer;
      quadratic += 2.0 * z[i] * z[i] / n * outer;
      ++out.inlier_count;
    }
    if (boundary) {
      boundary_noise += eps[i] / n * outer;
      ++out.boundary_count;
    }
  }
  out.inlier_noise_norm = symmetric_spectral_norm(inlier_noise);
  out.boundary_noise_norm = symmetric_spectral_norm(boundary_noise);
  out.quadratic_min_eig = jacobi_eigen(quadratic).values[0];
  return out;
}

ConsistencyAdvice consistency_advisor(Index n, const Signal& x_true, double mean_abs_noise, double c1, double c2,
                                      double rho0, double alpha, double lambda) {
  if (!x_true.is_real()) throw UnsupportedField("the consistency conditions are stated for real signals");
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (x_true.support_size() == 0) throw InvalidArgument("x_true must be nonzero");
  const double p = static_cast<double>(x_true.size());
  ConsistencyAdvice out;
  out.t_n = std::sqrt(2.0 * (2.0 * p + 1.0) * std::log(1.0 + 2.0 * static_cast<double>(n)) / static_cast<double>(n));

  const double gap = 2.0 * (1.0 - rho0) * c1 - 1.0;
  out.alpha_min = gap > 0 ? 6.0 * mean_abs_noise / gap : std::numeric_limits<double>::infinity();
  out.alpha_ok = gap > 0 && alpha >= out.alpha_min;
  out.rho0_max = c1 > 0 ? 1.0 - 1.0 / (2.0 * c1) : -std::numeric_limits<double>::infinity();
  out.rho0_ok = rho0 > 0 && rho0 < out.rho0_max;

  double min_entry = std::numeric_limits<double>::infinity();
  for (Index j : x_true.support()) min_entry = std::min(min_entry, std::abs(x_true.real_values()[j]));
  out.min_entry_required = 2.0 * std::pow(out.t_n, 1.0 / 6.0);
  out.min_entry_ok = min_entry >= out.min_entry_required;

  const double root_l0 = std::sqrt(static_cast<double>(x_true.support_size()));
  const double half = half_norm(x_true);
  const double energy = x_true.norm() * x_true.norm();
  out.lambda_max = 0.25 * c2 * std::pow(out.t_n, 2.0 / 3.0) / (root_l0 + half);
  out.lambda_min = std::sqrt(2.0) / 2.0 * c2 * std::sqrt(min_entry) * energy * out.t_n / root_l0;
  out.lambda_ok = lambda <= out.lambda_max && lambda >= out.lambda_min;
  return out;
}

namespace {

nlohmann::json indices_json(const std::vector<Index>& v) {
  auto out = nlohmann::json::array();
  for (Index j : v) out.push_back(j);
  return out;
}

}  // namespace

std::string to_json(const StabilityEstimate& s) {
  nlohmann::json doc;
  doc["mu_hat"] = s.mu_hat;
  doc["c2_hat"] = s.c2_hat;
  doc["samples"] = s.samples;
  doc["inlier_threshold"] = s.inlier_threshold;
  doc["inlier_count"] = s.inlier_count;
  doc["inliers_from_noise_record"] = s.inliers_from_noise_record;
  doc["rows_normalized"] = s.rows_normalized;
  doc["note"] = "sampled minima: upper bounds on the true infima";
  return doc.dump(2) + "\n";
}

std::string to_json(const CertificateReport& r) {
  nlohmann::json doc;
  doc["field"] = std::string(to_string(r.field));
  doc["support"] = indices_json(r.support);
  if (r.field == FieldTag::Complex) doc["realified_support"] = indices_json(r.realified_support);
  doc["lambda"] = r.lambda;
  doc["alpha"] = r.alpha;
  doc["eps1"] = r.eps1;
  doc["inlier_count"] = r.inlier_count;
  doc["boundary_count"] = r.boundary_count;
  doc["lhs_min_eig"] = r.lhs_min_eig;
  doc["lhs_eigenvector"] = detail::vector_to_json(r.lhs_eigenvector);
  doc["rhs_boundary_norms"] = r.rhs_boundary_norms;
  doc["rhs_reg_term"] = r.rhs_reg_term;
  doc["passed"] = r.passed;
  return doc.dump(2) + "\n";
}

std::string to_json(const Remark5Report& r) {
  nlohmann::json doc;
  doc["support"] = indices_json(r.support);
  doc["eps1"] = r.eps1;
  doc["inlier_count"] = r.inlier_count;
  doc["boundary_count"] = r.boundary_count;
  doc["inlier_noise_norm"] = r.inlier_noise_norm;
  doc["boundary_noise_norm"] = r.boundary_noise_norm;
  doc["quadratic_min_eig"] = r.quadratic_min_eig;
  return doc.dump(2) + "\n";
}

std::string to_json(const ConsistencyAdvice& a) {
  nlohmann::json doc;
  doc["t_n"] = a.t_n;
  doc["alpha_min"] = a.alpha_min;
  doc["alpha_ok"] = a.alpha_ok;
  doc["rho0_max"] = a.rho0_max;
  doc["rho0_ok"] = a.rho0_ok;
  doc["min_entry_required"] = a.min_entry_required;
  doc["min_entry_ok"] = a.min_entry_ok;
  doc["lambda_max"] = a.lambda_max;
  doc["lambda_min"] = a.lambda_min;
  doc["lambda_ok"] = a.lambda_ok;
  return doc.dump(2) + "\n";
}

}  // namespace robustpr

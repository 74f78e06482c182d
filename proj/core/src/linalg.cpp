#include "robustpr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robustpr/errors.hpp"

namespace robustpr {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, double tol, int max_sweeps) {
  if (input.rows() != input.cols()) throw InvalidArgument("jacobi_eigen needs a square matrix");
  const Index m = input.rows();
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m, m);
  const double scale = a.norm();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tol * scale) break;
    for (Index p = 0; p < m - 1; ++p) {
      for (Index q = p + 1; q < m; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing a(p, q) (Golub & Van Loan, sym.schur2).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < m; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index l, Index r) { return a(l, l) < a(r, r); });
  SymmetricEigen out{RealVector(m), Eigen::MatrixXd(m, m)};
  for (Index k = 0; k < m; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

double symmetric_spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return jacobi_eigen(a).values.cwiseAbs().maxCoeff();
}

}  // namespace robustpr

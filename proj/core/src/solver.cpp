#include "robustpr/solver.hpp"

#include <charconv>
#include <cmath>
#include <deque>
#include <sstream>

#include "robustpr/detail/kernels.hpp"
#include "robustpr/errors.hpp"

namespace robustpr {

namespace {

template <class Scalar>
std::vector<Index> support_of(const Vec<Scalar>& x) {
  std::vector<Index> out;
  for (Index j = 0; j < x.size(); ++j)
    if (x[j] != Scalar(0)) out.push_back(j);
  return out;
}

template <class Scalar>
double residual_at(const Vec<Scalar>& x, const Vec<Scalar>& grad, double lambda, double tau) {
  const Vec<Scalar> mapped = detail::half_threshold<Scalar>(x - 2.0 * tau * grad, 2.0 * lambda * tau);
  return (x - mapped).norm() / std::max(1.0, x.norm());
}

template <class Scalar>
SolverResult solve_impl(const Mat<Scalar>& sampling, const RealVector& b, const Vec<Scalar>& x0,
                        const SolverConfig& cfg, const IterateObserver& observer) {
  const double lambda = cfg.lambda;
  const double alpha = cfg.alpha;
  const auto objective_of = [&](const Vec<Scalar>& z, const Vec<Scalar>& x) {
    return detail::loss_from_projection(z, b, alpha) + lambda * detail::half_norm(x);
  };

  Vec<Scalar> x = x0;
  Vec<Scalar> z = detail::project(sampling, x);
  double fx = objective_of(z, x);
  Vec<Scalar> grad = detail::gradient_from_projection(sampling, z, b, alpha);

  SolverResult result{Signal(x0), {}, Termination::MaxIterations, fx, fx, 0.0, true};
  if (observer) observer(0, result.estimate);

  std::deque<std::vector<Index>> recent_supports;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    bool accepted = false;
    Vec<Scalar> candidate, z_candidate;
    double f_candidate = 0.0, tau = 0.0, step = 0.0;
    int j = 0;
    for (; j <= cfg.max_backtracks; ++j) {
      tau = cfg.gamma * std::pow(cfg.beta, j);
      candidate = detail::half_threshold<Scalar>(x - 2.0 * tau * grad, 2.0 * lambda * tau);
      z_candidate = detail::project(sampling, candidate);
      f_candidate = objective_of(z_candidate, candidate);
      step = (candidate - x).norm();
      // Same expression the trace checks use, so recorded descent is exact.
      if (fx - f_candidate >= cfg.delta * step * step) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.termination = Termination::LineSearchFailed;
      break;
    }

    Vec<Scalar> grad_candidate = detail::gradient_from_projection(sampling, z_candidate, b, alpha);
    const double previous_norm = x.norm();

    IterationRecord record;
    record.k = k;
    record.F_value = f_candidate;
    record.tau = tau;
    record.j = j;
    record.step_norm = step;
    record.support_size = detail::support_size(candidate);
    record.fixed_point_residual = residual_at(candidate, grad_candidate, lambda, tau);
    result.trace.push_back(record);

    x = std::move(candidate);
    z = std::move(z_candidate);
    grad = std::move(grad_candidate);
    fx = f_candidate;

    recent_supports.push_back(support_of(x));
    if (recent_supports.size() > 10) recent_supports.pop_front();

    if (observer) observer(k, Signal(x));

    if (step <= cfg.epsilon * std::max(1.0, previous_norm)) {
      result.termination = Termination::Converged;
      break;
    }
  }

  result.estimate = Signal(x);
  result.final_objective = fx;
  if (!result.trace.empty()) result.final_fixed_point_residual = result.trace.back().fixed_point_residual;
  if (result.termination == Termination::Converged)
    for (const auto& s : recent_supports)
      if (s != recent_supports.back()) result.support_settled = false;
  return result;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in (0, 1]");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be > 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be > 0");
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (max_backtracks < 1) throw InvalidArgument("max_backtracks must be >= 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

SolverResult solve(const MeasurementEnsemble& e, const Signal& x0, const SolverConfig& cfg,
                   const IterateObserver& observer) {
  cfg.validate();
  return visit(e, x0, [&](const auto& a, const auto& x) { return solve_impl(a, e.observations(), x, cfg, observer); });
}

double fixed_point_residual(const Signal& x, const MeasurementEnsemble& e, double lambda, double alpha, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
  return visit(e, x, [&](const auto& a, const auto& v) {
    const auto grad = detail::gradient_from_projection(a, detail::project(a, v), e.observations(), alpha);
    return residual_at(v, grad, lambda, tau);
  });
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string trace_to_csv(const std::vector<IterationRecord>& trace) {
  std::ostringstream out;
  out << "k,F,tau,j,step_norm,support_size,fp_residual\n";
  for (const auto& r : trace)
    out << r.k << ',' << format_double(r.F_value) << ',' << format_double(r.tau) << ',' << r.j << ','
        << format_double(r.step_norm) << ',' << r.support_size << ',' << format_double(r.fixed_point_residual)
        << '\n';
  return out.str();
}

}  // namespace robustpr

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "robustpr/ensemble.hpp"
#include "robustpr/objective.hpp"

namespace robustpr {

/// Parameters of the majorization-minimization iteration
///   x+ = H_{2 lambda tau}(x - 2 tau g(x)),  tau = gamma beta^j,
/// where j is the smallest nonnegative integer with
///   F(x) - F(x+) >= delta ||x+ - x||^2.
struct SolverConfig {
  double lambda = 0.0;  ///< must be set explicitly
  double alpha = 1.345;
  double gamma = 1.0;
  double beta = 0.5;
  double delta = 1e-4;
  double epsilon = 1e-6;
  int max_iter = 5000;
  int max_backtracks = 60;

  void validate() const;
  ObjectiveParams objective_params() const { return {{alpha}, lambda}; }
};

/// One accepted iteration. `k` is the index of the iterate produced
/// (x^k, k >= 1); F_value = F(x^k); tau/j/step_norm describe the step
/// x^{k-1} -> x^k; fixed_point_residual is that of x^k at the same tau.
struct IterationRecord {
  int k = 0;
  double F_value = 0.0;
  double tau = 0.0;
  int j = 0;
  double step_norm = 0.0;
  Index support_size = 0;
  double fixed_point_residual = 0.0;
};

enum class Termination { Converged, MaxIterations, LineSearchFailed };

std::string to_string(Termination t);

struct SolverResult {
  Signal estimate;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::MaxIterations;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  /// Residual of `estimate` at the last accepted step size (0 when no step
  /// was accepted and the estimate is x0).
  double final_fixed_point_residual = 0.0;
  /// False when the support changed during the last 10 iterations of a
  /// converged run (a soft warning, not an error).
  bool support_settled = true;

  int iterations() const { return static_cast<int>(trace.size()); }
};

/// Called with (k, x^k) for k = 0 (the start point) and every accepted iterate.
using IterateObserver = std::function<void(int, const Signal&)>;

/// Runs the iteration from x0. A failed line search ends the run with
/// Termination::LineSearchFailed and keeps the trace; it does not throw.
SolverResult solve(const MeasurementEnsemble& e, const Signal& x0, const SolverConfig& cfg,
                   const IterateObserver& observer = {});

/// ||x - H_{2 lambda tau}(x - 2 tau g(x))|| / max{1, ||x||}.
double fixed_point_residual(const Signal& x, const MeasurementEnsemble& e, double lambda, double alpha, double tau);

/// Trace CSV with header k,F,tau,j,step_norm,support_size,fp_residual.
std::string trace_to_csv(const std::vector<IterationRecord>& trace);

/// Formats a double in shortest round-trip form (shared by CSV writers).
std::string format_double(double v);

}  // namespace robustpr

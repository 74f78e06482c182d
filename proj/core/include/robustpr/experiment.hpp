#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robustpr/ensemble.hpp"
#include "robustpr/solver.hpp"
#include "robustpr/spectral.hpp"

namespace robustpr {

/// Monte Carlo protocol: for every n in n_grid and every trial, synthesize an
/// instance with trial_seed(master_seed, n, trial), start from the spectral
/// point and solve. A trial succeeds when its relative error is below
/// success_threshold.
struct ExperimentSpec {
  Index p = 128;
  Index s = 12;
  FieldTag field = FieldTag::Real;
  std::vector<Index> n_grid;
  NoiseSpec noise;
  int trials = 50;
  SolverConfig solver;
  /// Defaults to default_spectral_config(field, p, s).
  std::optional<SpectralConfig> spectral;
  /// When nonempty, each trial picks lambda from this grid by the oracle rule
  /// (smallest relative error) and solver.lambda is ignored.
  std::vector<double> lambda_grid;
  std::uint64_t master_seed = 0;
  double success_threshold = 5e-3;
  /// Worker threads for trials; 0 = hardware concurrency.
  unsigned threads = 1;

  void validate() const;
  SpectralConfig spectral_config() const;
};

struct TrialRecord {
  Index n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double relative_error = 0.0;
  int iterations = 0;
  Termination termination = Termination::MaxIterations;
  double wall_time = 0.0;  ///< seconds; excluded from file exports unless asked for
  bool success = false;
};

struct GridPointSummary {
  Index n = 0;
  int successes = 0;
  int trials = 0;
  double success_rate = 0.0;
  double median_error = 0.0;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<TrialRecord> records;  ///< ordered by (n, trial)
  std::vector<GridPointSummary> summary;
};

ExperimentReport run_experiment(const ExperimentSpec& spec);

/// One row per record: n,trial,seed,lambda,relative_error,iterations,termination,success[,wall_time].
std::string records_to_csv(const ExperimentReport& report, bool include_timing = false);
/// One row per grid point: n,n_over_p,success_rate,successes,trials,median_error.
std::string summary_to_csv(const ExperimentReport& report);
/// Aggregates plus configuration echo.
std::string report_to_json(const ExperimentReport& report);

struct ErrorCurve {
  std::vector<double> errors;  ///< errors[k] = relative error of x^k, k = 0..iterations
  SolverResult result;
};

/// Solves from x0 and records the relative error of every iterate. Throws
/// MissingData when the ensemble has no ground truth.
ErrorCurve error_vs_iteration(const MeasurementEnsemble& e, const Signal& x0, const SolverConfig& cfg);
/// Same, starting from the spectral point.
ErrorCurve error_vs_iteration(const MeasurementEnsemble& e, const SolverConfig& cfg, const SpectralConfig& spectral,
                              std::uint64_t spectral_seed);

/// k,rel_error
std::string curve_to_csv(const std::vector<double>& errors);

enum class ValidationRule { Oracle, Holdout };

struct LambdaScore {
  double lambda = 0.0;
  double score = 0.0;
  double relative_error = 0.0;  ///< NaN without ground truth
  int iterations = 0;
  Termination termination = Termination::MaxIterations;
};

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<LambdaScore> table;
};

/// Solves once per grid value and picks the smallest score, ties going to
/// the larger lambda. Oracle: score = relative error (needs ground truth).
/// Holdout: fit on a seeded 80% of the rows, score = mean Huber loss on the rest.
LambdaSelection lambda_grid_search(const MeasurementEnsemble& e, const Signal& x0, const SolverConfig& base,
                                   const std::vector<double>& grid, ValidationRule rule,
                                   std::uint64_t holdout_seed = 0);

std::string lambda_table_to_csv(const LambdaSelection& selection);

/// Index split used by the holdout rule: (train, test), each ascending.
std::pair<std::vector<Index>, std::vector<Index>> holdout_split(Index n, std::uint64_t seed);

}  // namespace robustpr

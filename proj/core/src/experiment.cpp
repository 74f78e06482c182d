#include "robustpr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "robustpr/errors.hpp"
#include "robustpr/metrics.hpp"
#include "robustpr/objective.hpp"
#include "robustpr/random.hpp"

namespace robustpr {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

template <class Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

TrialRecord run_trial(const ExperimentSpec& spec, Index n, int trial) {
  TrialRecord rec;
  rec.n = n;
  rec.trial = trial;
  rec.seed = trial_seed(spec.master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
  const auto start = std::chrono::steady_clock::now();

  const MeasurementEnsemble e = synthesize_instance(spec.p, spec.s, n, spec.field, spec.noise, rec.seed);
  const Signal x0 = spectral_init(e, spec.spectral_config(), rec.seed).estimate;
  SolverConfig cfg = spec.solver;
  if (!spec.lambda_grid.empty())
    cfg.lambda = lambda_grid_search(e, x0, cfg, spec.lambda_grid, ValidationRule::Oracle).lambda;
  const SolverResult result = solve(e, x0, cfg);

  rec.lambda = cfg.lambda;
  rec.relative_error = relative_error(result.estimate, *e.ground_truth());
  rec.iterations = result.iterations();
  rec.termination = result.termination;
  rec.success = result.termination != Termination::LineSearchFailed && rec.relative_error < spec.success_threshold;
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (p < 1) throw InvalidArgument("p must be >= 1");
  if (s < 1 || s > p) throw InvalidArgument("s must satisfy 1 <= s <= p");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (n_grid.empty()) throw InvalidArgument("n grid must be nonempty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 1) throw InvalidArgument("n grid entries must be >= 1");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) throw InvalidArgument("n grid must be strictly ascending");
  }
  noise.validate();
  if (!(success_threshold > 0.0)) throw InvalidArgument("success threshold must be > 0");
  if (lambda_grid.empty()) {
    solver.validate();
  } else {
    SolverConfig probe = solver;
    for (double lambda : lambda_grid) {
      probe.lambda = lambda;
      probe.validate();
    }
  }
  spectral_config().validate(p);
}

SpectralConfig ExperimentSpec::spectral_config() const {
  return spectral ? *spectral : default_spectral_config(field, p, s);
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentReport report;
  report.spec = spec;
  const std::size_t per_n = static_cast<std::size_t>(spec.trials);
  report.records.resize(spec.n_grid.size() * per_n);
  parallel_for(report.records.size(), spec.threads, [&](std::size_t idx) {
    report.records[idx] = run_trial(spec, spec.n_grid[idx / per_n], static_cast<int>(idx % per_n));
  });

  for (std::size_t g = 0; g < spec.n_grid.size(); ++g) {
    GridPointSummary sum;
    sum.n = spec.n_grid[g];
    sum.trials = spec.trials;
    std::vector<double> errors;
    for (std::size_t t = 0; t < per_n; ++t) {
      const TrialRecord& rec = report.records[g * per_n + t];
      sum.successes += rec.success;
      errors.push_back(rec.relative_error);
    }
    sum.success_rate = static_cast<double>(sum.successes) / static_cast<double>(sum.trials);
    sum.median_error = median(std::move(errors));
    report.summary.push_back(sum);
  }
  return report;
}

std::string records_to_csv(const ExperimentReport& report, bool include_timing) {
  std::ostringstream out;
  out << "n,trial,seed,lambda,relative_error,iterations,termination,success";
  if (include_timing) out << ",wall_time";
  out << '\n';
  for (const auto& r : report.records) {
    out << r.n << ',' << r.trial << ',' << r.seed << ',' << format_double(r.lambda) << ','
        << format_double(r.relative_error) << ',' << r.iterations << ',' << to_string(r.termination) << ','
        << (r.success ? 1 : 0);
    if (include_timing) out << ',' << format_double(r.wall_time);
    out << '\n';
  }
  return out.str();
}

std::string summary_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "n,n_over_p,success_rate,successes,trials,median_error\n";
  for (const auto& s : report.summary)
    out << s.n << ',' << format_double(static_cast<double>(s.n) / static_cast<double>(report.spec.p)) << ','
        << format_double(s.success_rate) << ',' << s.successes << ',' << s.trials << ','
        << format_double(s.median_error) << '\n';
  return out.str();
}

std::string report_to_json(const ExperimentReport& report) {
  const ExperimentSpec& spec = report.spec;
  nlohmann::json doc;
  auto& cfg = doc["config"];
  cfg["p"] = spec.p;
  cfg["s"] = spec.s;
  cfg["field"] = std::string(to_string(spec.field));
  cfg["n_grid"] = spec.n_grid;
  cfg["noise"] = to_string(spec.noise);
  cfg["trials"] = spec.trials;
  cfg["master_seed"] = spec.master_seed;
  cfg["success_threshold"] = spec.success_threshold;
  cfg["lambda"] = spec.solver.lambda;
  cfg["lambda_grid"] = spec.lambda_grid;
  cfg["alpha"] = spec.solver.alpha;
  cfg["gamma"] = spec.solver.gamma;
  cfg["beta"] = spec.solver.beta;
  cfg["delta"] = spec.solver.delta;
  cfg["epsilon"] = spec.solver.epsilon;
  cfg["max_iter"] = spec.solver.max_iter;
  cfg["max_backtracks"] = spec.solver.max_backtracks;
  const SpectralConfig sc = spec.spectral_config();
  cfg["power_iterations"] = sc.power_iterations;
  cfg["power_tol"] = sc.power_tol;
  cfg["truncation"] = sc.truncation ? nlohmann::json(*sc.truncation) : nlohmann::json(nullptr);
  auto& rows = doc["summary"];
  rows = nlohmann::json::array();
  for (const auto& s : report.summary)
    rows.push_back({{"n", s.n},
                    {"success_rate", s.success_rate},
                    {"successes", s.successes},
                    {"trials", s.trials},
                    {"median_error", s.median_error}});
  return doc.dump(2) + "\n";
}

ErrorCurve error_vs_iteration(const MeasurementEnsemble& e, const Signal& x0, const SolverConfig& cfg) {
  if (!e.ground_truth()) throw MissingData("error_vs_iteration needs an instance with ground truth (x_true)");
  const Signal& truth = *e.ground_truth();
  std::vector<double> errors;
  SolverResult result = solve(e, x0, cfg, [&](int, const Signal& x) { errors.push_back(relative_error(x, truth)); });
  return {std::move(errors), std::move(result)};
}

ErrorCurve error_vs_iteration(const MeasurementEnsemble& e, const SolverConfig& cfg, const SpectralConfig& spectral,
                              std::uint64_t spectral_seed) {
  if (!e.ground_truth()) throw MissingData("error_vs_iteration needs an instance with ground truth (x_true)");
  return error_vs_iteration(e, spectral_init(e, spectral, spectral_seed).estimate, cfg);
}

std::string curve_to_csv(const std::vector<double>& errors) {
  std::ostringstream out;
  out << "k,rel_error\n";
  for (std::size_t k = 0; k < errors.size(); ++k) out << k << ',' << format_double(errors[k]) << '\n';
  return out.str();
}

std::pair<std::vector<Index>, std::vector<Index>> holdout_split(Index n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("holdout validation needs at least 2 measurements");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(derive_stream(seed, StreamTag::Holdout));
  for (Index k = n - 1; k > 0; --k)
    std::swap(order[static_cast<std::size_t>(k)], order[rng.index(static_cast<std::uint64_t>(k + 1))]);
  const Index test_count = std::max<Index>(1, n / 5);
  std::vector<Index> test(order.begin(), order.begin() + test_count);
  std::vector<Index> train(order.begin() + test_count, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {std::move(train), std::move(test)};
}

LambdaSelection lambda_grid_search(const MeasurementEnsemble& e, const Signal& x0, const SolverConfig& base,
                                   const std::vector<double>& grid, ValidationRule rule, std::uint64_t holdout_seed) {
  if (grid.empty()) throw InvalidArgument("lambda grid must be nonempty");
  if (rule == ValidationRule::Oracle && !e.ground_truth())
    throw MissingData("oracle lambda selection needs ground truth (x_true)");
  e.check_compatible(x0);

  std::optional<MeasurementEnsemble> train, test;
  if (rule == ValidationRule::Holdout) {
    auto [train_rows, test_rows] = holdout_split(e.n(), holdout_seed ^ e.seed());
    train = e.subset(train_rows);
    test = e.subset(test_rows);
  }

  LambdaSelection selection;
  double best_score = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    SolverConfig cfg = base;
    cfg.lambda = lambda;
    const SolverResult result = solve(train ? *train : e, x0, cfg);
    LambdaScore row;
    row.lambda = lambda;
    row.iterations = result.iterations();
    row.termination = result.termination;
    row.relative_error = e.ground_truth() ? relative_error(result.estimate, *e.ground_truth())
                                          : std::numeric_limits<double>::quiet_NaN();
    row.score = rule == ValidationRule::Oracle ? row.relative_error : loss(result.estimate, *test, cfg.alpha);
    selection.table.push_back(row);
    if (selection.table.size() == 1 || row.score < best_score ||
        (row.score == best_score && lambda > selection.lambda)) {
      best_score = row.score;
      selection.lambda = lambda;
    }
  }
  return selection;
}

std::string lambda_table_to_csv(const LambdaSelection& selection) {
  std::ostringstream out;
  out << "lambda,score,relative_error,iterations,termination,chosen\n";
  for (const auto& r : selection.table)
    out << format_double(r.lambda) << ',' << format_double(r.score) << ',' << format_double(r.relative_error) << ','
        << r.iterations << ',' << to_string(r.termination) << ',' << (r.lambda == selection.lambda ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace robustpr

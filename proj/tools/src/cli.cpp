#include "robustpr_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <robustpr/detail/json_convert.hpp>
#include <robustpr/diagnostics.hpp>
#include <robustpr/errors.hpp>
#include <robustpr/experiment.hpp>
#include <robustpr/instance_io.hpp>
#include <robustpr/metrics.hpp>
#include <robustpr/solver.hpp>
#include <robustpr/spectral.hpp>

#include "robustpr_cli/pgm.hpp"

namespace robustpr::cli {

namespace {

using json = nlohmann::json;

// Flat `key = value` lines with `#` comments. Keys apply to the options of
// the subcommand selected on the command line.
class FlatConfig : public CLI::Config {
 public:
  explicit FlatConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    std::vector<std::string> path;
    for (const CLI::App* app = root_;;) {
      const auto subs = app->get_subcommands();
      if (subs.empty()) break;
      app = subs.front();
      path.push_back(app->get_name());
    }
    std::vector<CLI::ConfigItem> items;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = CLI::detail::trim_copy(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw CLI::ConfigError("config line " + std::to_string(number) + ": expected key = value");
      std::string key = CLI::detail::trim_copy(line.substr(0, eq));
      std::string value = CLI::detail::trim_copy(line.substr(eq + 1));
      if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
        value = value.substr(1, value.size() - 2);
      if (key.empty()) throw CLI::ConfigError("config line " + std::to_string(number) + ": empty key");
      CLI::ConfigItem item;
      item.parents = path;
      item.name = key;
      item.inputs = {value};
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  const CLI::App* root_;
};

CLI::Validator open_unit_interval(bool include_one) {
  return CLI::Validator(
      [include_one](std::string& text) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(text, v)) return "must be a number";
        if (!(v > 0.0) || (include_one ? v > 1.0 : v >= 1.0))
          return include_one ? "must lie in (0, 1]" : "must lie in (0, 1)";
        return {};
      },
      include_one ? "(0,1]" : "(0,1)");
}

const CLI::Validator kNoiseValidator(
    [](std::string& text) -> std::string {
      try {
        parse_noise(text);
      } catch (const std::exception& e) {
        return e.what();
      }
      return {};
    },
    "NOISE");

const CLI::Validator kPositive(
    [](std::string& text) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(text, v) || !(v > 0.0) || !std::isfinite(v)) return "must be > 0";
      return {};
    },
    "POSITIVE");

const CLI::Validator kNonNegative(
    [](std::string& text) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(text, v) || !(v >= 0.0) || !std::isfinite(v)) return "must be >= 0";
      return {};
    },
    "NONNEGATIVE");

[[noreturn]] void usage(const std::string& message) { throw InvalidArgument(message); }

struct SolverFlags {
  std::optional<double> lambda;
  double alpha = 1.345;
  double gamma = 1.0;
  double beta = 0.5;
  double delta = 1e-4;
  double epsilon = 1e-6;
  int max_iter = 5000;
  int max_backtracks = 60;

  void add(CLI::App* app, bool with_lambda = true) {
    if (with_lambda)
      app->add_option("--lambda", lambda, "Regularization weight (no default; tune with bench lambda-grid)")
          ->check(kPositive);
    app->add_option("--alpha", alpha, "Huber threshold")->check(kPositive);
    app->add_option("--gamma", gamma, "Initial step size")->check(open_unit_interval(true));
    app->add_option("--beta", beta, "Backtracking factor")->check(open_unit_interval(false));
    app->add_option("--delta", delta, "Sufficient-decrease constant")->check(kPositive);
    app->add_option("--epsilon", epsilon, "Relative step tolerance")->check(kPositive);
    app->add_option("--max-iter", max_iter, "Iteration cap")->check(kPositive);
    app->add_option("--max-backtracks", max_backtracks, "Backtracking cap per iteration")
        ->check(kPositive);
  }

  SolverConfig config(double lambda_value) const {
    SolverConfig cfg;
    cfg.lambda = lambda_value;
    cfg.alpha = alpha;
    cfg.gamma = gamma;
    cfg.beta = beta;
    cfg.delta = delta;
    cfg.epsilon = epsilon;
    cfg.max_iter = max_iter;
    cfg.max_backtracks = max_backtracks;
    cfg.validate();
    return cfg;
  }

  SolverConfig config() const {
    if (!lambda) usage("lambda required (see bench lambda-grid)");
    return config(*lambda);
  }
};

struct SpectralFlags {
  int power_iterations = 200;
  double power_tol = 1e-8;
  Index truncation = 0;

  void add(CLI::App* app) {
    app->add_option("--power-iterations", power_iterations, "Power-iteration cap")->check(kPositive);
    app->add_option("--power-tol", power_tol, "Power-iteration tolerance")->check(kPositive);
    app->add_option("--truncation", truncation,
                    "Keep this many largest entries of the spectral direction (0 = automatic)")
        ->check(kNonNegative);
  }

  SpectralConfig config(FieldTag field, Index p, std::optional<Index> sparsity) const {
    SpectralConfig cfg = default_spectral_config(field, p, sparsity);
    cfg.power_iterations = power_iterations;
    cfg.power_tol = power_tol;
    if (truncation > 0) {
      if (truncation > p) usage("--truncation must not exceed p = " + std::to_string(p));
      cfg.truncation = truncation;
    }
    cfg.validate(p);
    return cfg;
  }
};

// An instance either read from --instance or synthesized from the remaining flags.
struct InstanceSource {
  std::string instance;
  Index p = 128;
  Index s = 12;
  double ratio = 6.0;
  std::string field = "real";
  std::string noise = "none";
  std::uint64_t seed = 0;

  void add(CLI::App* app, double default_ratio) {
    ratio = default_ratio;
    app->add_option("--instance", instance, "Instance JSON (otherwise one is generated)");
    app->add_option("--p", p, "Signal length when generating")->check(kPositive);
    app->add_option("--s", s, "Sparsity when generating")->check(kPositive);
    app->add_option("--ratio", ratio, "n/p when generating")->check(kPositive);
    app->add_option("--field", field, "real or complex")->check(CLI::IsMember({"real", "complex"}));
    app->add_option("--noise", noise, "none | type1:eta | type2:eta | type3:eta | gaussian:eta")
        ->check(kNoiseValidator);
    app->add_option("--seed", seed, "Seed when generating");
  }

  MeasurementEnsemble load() const {
    if (!instance.empty()) return read_instance(instance);
    if (s > p) usage("--s must not exceed --p");
    const auto n = static_cast<Index>(std::llround(ratio * static_cast<double>(p)));
    if (n < 1) usage("--ratio gives n < 1");
    return synthesize_instance(p, s, n, parse_field(field), parse_noise(noise), seed);
  }

  std::optional<Index> sparsity() const { return instance.empty() ? std::optional<Index>(s) : std::nullopt; }
};

std::string with_suffix(const std::string& prefix, const std::string& suffix) { return prefix + suffix; }

std::string file_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

json solver_json(const SolverConfig& cfg) {
  return {{"lambda", cfg.lambda},     {"alpha", cfg.alpha},       {"gamma", cfg.gamma},
          {"beta", cfg.beta},         {"delta", cfg.delta},       {"epsilon", cfg.epsilon},
          {"max_iter", cfg.max_iter}, {"max_backtracks", cfg.max_backtracks}};
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  Index p = 0, s = 0, n = 0;
  std::string field = "real";
  std::string noise = "none";
  std::uint64_t seed = 0;
  std::string out;
};

void add_gen(CLI::App& root, GenOptions& o, std::map<CLI::App*, std::function<void(std::ostream&)>>& actions) {
  auto* app = root.add_subcommand("gen", "Generate a synthetic instance");
  app->add_option("--p", o.p, "Signal length")->required()->check(kPositive);
  app->add_option("--s", o.s, "Sparsity")->required()->check(kPositive);
  app->add_option("--n", o.n, "Number of measurements")->required()->check(kPositive);
  app->add_option("--field", o.field, "real or complex")->check(CLI::IsMember({"real", "complex"}));
  app->add_option("--noise", o.noise, "none | type1:eta | type2:eta | type3:eta | gaussian:eta")
      ->check(kNoiseValidator);
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--out", o.out, "Instance JSON to write")->required();
  actions[app] = [&o](std::ostream& out) {
    if (o.s > o.p) usage("--s must not exceed --p");
    const NoiseSpec noise = parse_noise(o.noise);
    const MeasurementEnsemble e = synthesize_instance(o.p, o.s, o.n, parse_field(o.field), noise, o.seed);
    write_instance(o.out, e);
    out << "p=" << o.p << " n=" << o.n << " s=" << o.s << " field=" << o.field << " noise=" << to_string(noise)
        << " seed=" << o.seed << " -> " << o.out << '\n';
  };
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string instance;
  std::string out;
  std::string trace;
  std::optional<Index> sparsity;
  std::optional<std::uint64_t> spectral_seed;
  SolverFlags solver;
  SpectralFlags spectral;
};

void add_solve(CLI::App& root, SolveOptions& o, std::map<CLI::App*, std::function<void(std::ostream&)>>& actions) {
  auto* app = root.add_subcommand("solve", "Spectral initialization followed by the MM solver");
  app->add_option("--instance", o.instance, "Instance JSON")->required();
  app->add_option("--out", o.out, "Result JSON to write")->required();
  app->add_option("--trace", o.trace, "Per-iteration trace CSV to write");
  app->add_option("--sparsity", o.sparsity, "Sparsity hint for the complex spectral truncation")
      ->check(kPositive);
  app->add_option("--spectral-seed", o.spectral_seed, "Seed of the power-iteration start (default: instance seed)");
  o.solver.add(app);
  o.spectral.add(app);
  actions[app] = [&o](std::ostream& out) {
    const SolverConfig cfg = o.solver.config();
    const MeasurementEnsemble e = read_instance(o.instance);
    const SpectralConfig sc = o.spectral.config(e.field(), e.p(), o.sparsity);
    const SpectralInit init = spectral_init(e, sc, o.spectral_seed.value_or(e.seed()));
    const SolverResult result = solve(e, init.estimate, cfg);

    json doc;
    doc["field"] = std::string(to_string(e.field()));
    doc["p"] = e.p();
    doc["n"] = e.n();
    doc["lambda"] = cfg.lambda;
    doc["alpha"] = cfg.alpha;
    doc["solver"] = solver_json(cfg);
    doc["termination"] = to_string(result.termination);
    doc["iterations"] = result.iterations();
    doc["initial_objective"] = result.initial_objective;
    doc["final_objective"] = result.final_objective;
    doc["fixed_point_residual"] = result.final_fixed_point_residual;
    doc["support_size"] = result.estimate.support_size();
    doc["support_settled"] = result.support_settled;
    doc["spectral_degenerate"] = init.degenerate;
    std::optional<double> rel;
    if (e.ground_truth()) rel = relative_error(result.estimate, *e.ground_truth());
    doc["relative_error"] = rel ? json(*rel) : json(nullptr);
    doc["estimate"] = detail::signal_to_json(result.estimate);
    write_text_file(o.out, doc.dump(2) + "\n");
    if (!o.trace.empty()) write_text_file(o.trace, trace_to_csv(result.trace));

    out << "termination=" << to_string(result.termination) << " iterations=" << result.iterations()
        << " F=" << format_double(result.final_objective);
    if (rel) out << " relative_error=" << format_double(*rel);
    out << '\n';
  };
}

// ---------------------------------------------------------------- bench

struct MonteCarloOptions {
  Index p = 128;
  Index s = 12;
  std::string field = "real";
  std::vector<double> grid;
  int trials = 50;
  std::string noise = "none";
  std::uint64_t seed = 0;
  std::vector<double> lambda_grid;
  double success_threshold = 5e-3;
  bool timing = false;
  std::string out;
  SolverFlags solver;
  SpectralFlags spectral;
};

void add_monte_carlo_flags(CLI::App* app, MonteCarloOptions& o) {
  app->add_option("--p", o.p, "Signal length")->check(kPositive);
  app->add_option("--s", o.s, "Sparsity")->check(kPositive);
  app->add_option("--field", o.field, "real or complex")->check(CLI::IsMember({"real", "complex"}));
  app->add_option("--grid", o.grid, "Comma-separated n/p ratios, ascending")->required()->delimiter(',');
  app->add_option("--trials", o.trials, "Trials per grid point")->check(kPositive);
  app->add_option("--noise", o.noise, "none | type1:eta | type2:eta | type3:eta | gaussian:eta")
      ->check(kNoiseValidator);
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--lambda-grid", o.lambda_grid, "Per-trial oracle choice of lambda from this list")
      ->delimiter(',');
  app->add_option("--success-threshold", o.success_threshold, "Relative error counted as success")
      ->check(kPositive);
  app->add_flag("--timing", o.timing, "Add wall times to the records CSV");
  app->add_option("--out", o.out, "Output prefix")->required();
  o.solver.add(app);
  o.spectral.add(app);
}

ExperimentReport run_monte_carlo(const MonteCarloOptions& o) {
  if (o.grid.empty()) usage("--grid must list at least one n/p ratio");
  if (o.s > o.p) usage("--s must not exceed --p");
  ExperimentSpec spec;
  spec.p = o.p;
  spec.s = o.s;
  spec.field = parse_field(o.field);
  for (double r : o.grid) {
    if (!(r > 0.0) || !std::isfinite(r)) usage("--grid entries must be > 0");
    const auto n = static_cast<Index>(std::llround(r * static_cast<double>(o.p)));
    if (n < 1) usage("--grid entry gives n < 1");
    spec.n_grid.push_back(n);
  }
  for (std::size_t k = 1; k < spec.n_grid.size(); ++k)
    if (spec.n_grid[k] <= spec.n_grid[k - 1]) usage("--grid must be strictly ascending in n = ratio * p");
  spec.noise = parse_noise(o.noise);
  spec.trials = o.trials;
  spec.master_seed = o.seed;
  spec.success_threshold = o.success_threshold;
  for (double l : o.lambda_grid)
    if (!(l > 0.0)) usage("--lambda-grid entries must be > 0");
  spec.lambda_grid = o.lambda_grid;
  if (o.lambda_grid.empty()) {
    spec.solver = o.solver.config();
  } else {
    if (o.solver.lambda) usage("give either --lambda or --lambda-grid, not both");
    spec.solver = o.solver.config(o.lambda_grid.front());
  }
  spec.spectral = o.spectral.config(spec.field, spec.p, spec.s);
  spec.threads = thread_budget();
  return run_experiment(spec);
}

void write_monte_carlo(const MonteCarloOptions& o, const ExperimentReport& report, const PlotSpec& plot) {
  write_text_file(with_suffix(o.out, ".records.csv"), records_to_csv(report, o.timing));
  write_text_file(with_suffix(o.out, ".summary.csv"), summary_to_csv(report));
  write_text_file(with_suffix(o.out, ".json"), report_to_json(report));
  write_text_file(with_suffix(o.out, ".gp"), gnuplot_script(plot));
}

void print_summary(std::ostream& out, const ExperimentReport& report) {
  for (const auto& s : report.summary)
    out << "n=" << s.n << " success_rate=" << format_double(s.success_rate)
        << " median_error=" << format_double(s.median_error) << '\n';
}

struct ErrorIterOptions {
  InstanceSource source;
  std::string out;
  SolverFlags solver;
  SpectralFlags spectral;
};

struct LambdaGridOptions {
  InstanceSource source;
  std::vector<double> grid;
  std::string rule = "oracle";
  std::uint64_t holdout_seed = 0;
  std::string out;
  SolverFlags solver;
  SpectralFlags spectral;
};

struct BenchOptions {
  MonteCarloOptions success;
  MonteCarloOptions consistency;
  ErrorIterOptions error_iter;
  LambdaGridOptions lambda_grid;
};

void add_bench(CLI::App& root, BenchOptions& o, std::map<CLI::App*, std::function<void(std::ostream&)>>& actions) {
  auto* bench = root.add_subcommand("bench", "Monte Carlo benchmarks with CSV and plot-script output");
  bench->require_subcommand(1);

  auto* success = bench->add_subcommand("success-rate", "Success rate versus n/p");
  add_monte_carlo_flags(success, o.success);
  actions[success] = [&o](std::ostream& out) {
    const auto& m = o.success;
    const ExperimentReport report = run_monte_carlo(m);
    write_monte_carlo(m, report,
                      {file_name(m.out + ".summary.csv"), "Success rate versus n/p", "n/p", "success rate", 2, 3,
                       false, false, "[0:1.05]"});
    print_summary(out, report);
  };

  auto* consistency = bench->add_subcommand("consistency", "Median relative error versus n");
  add_monte_carlo_flags(consistency, o.consistency);
  actions[consistency] = [&o](std::ostream& out) {
    const auto& m = o.consistency;
    const ExperimentReport report = run_monte_carlo(m);
    write_monte_carlo(m, report,
                      {file_name(m.out + ".summary.csv"), "Median relative error versus n", "n",
                       "median relative error", 1, 6, true, true, ""});
    print_summary(out, report);
  };

  auto* error_iter = bench->add_subcommand("error-iter", "Relative error versus iteration on one instance");
  o.error_iter.source.add(error_iter, 6.0);
  error_iter->add_option("--out", o.error_iter.out, "Output prefix")->required();
  o.error_iter.solver.add(error_iter);
  o.error_iter.spectral.add(error_iter);
  actions[error_iter] = [&o](std::ostream& out) {
    const auto& m = o.error_iter;
    const SolverConfig cfg = m.solver.config();
    const MeasurementEnsemble e = m.source.load();
    const SpectralConfig sc = m.spectral.config(e.field(), e.p(), m.source.sparsity());
    const ErrorCurve curve = error_vs_iteration(e, cfg, sc, e.seed());
    write_text_file(m.out + ".csv", curve_to_csv(curve.errors));
    write_text_file(m.out + ".gp", gnuplot_script({file_name(m.out + ".csv"), "Relative error versus iteration",
                                                   "iteration", "relative error", 1, 2, false, true, ""}));
    out << "iterations=" << curve.result.iterations() << " termination=" << to_string(curve.result.termination)
        << " final_error=" << format_double(curve.errors.back()) << '\n';
  };

  auto* lambda_grid = bench->add_subcommand("lambda-grid", "Choose lambda from a grid");
  o.lambda_grid.source.add(lambda_grid, 6.0);
  lambda_grid->add_option("--grid", o.lambda_grid.grid, "Comma-separated lambda values")
      ->required()
      ->delimiter(',');
  lambda_grid->add_option("--rule", o.lambda_grid.rule, "oracle (needs x_true) or holdout (80/20 split)")
      ->check(CLI::IsMember({"oracle", "holdout"}));
  lambda_grid->add_option("--holdout-seed", o.lambda_grid.holdout_seed, "Seed of the holdout split");
  lambda_grid->add_option("--out", o.lambda_grid.out, "Output prefix")->required();
  o.lambda_grid.solver.add(lambda_grid, false);
  o.lambda_grid.spectral.add(lambda_grid);
  actions[lambda_grid] = [&o](std::ostream& out) {
    const auto& m = o.lambda_grid;
    if (m.grid.empty()) usage("--grid must list at least one lambda");
    for (double l : m.grid)
      if (!(l > 0.0) || !std::isfinite(l)) usage("--grid entries must be > 0");
    const SolverConfig base = m.solver.config(m.grid.front());
    const MeasurementEnsemble e = m.source.load();
    const SpectralConfig sc = m.spectral.config(e.field(), e.p(), m.source.sparsity());
    const Signal x0 = spectral_init(e, sc, e.seed()).estimate;
    const ValidationRule rule = m.rule == "oracle" ? ValidationRule::Oracle : ValidationRule::Holdout;
    const LambdaSelection sel = lambda_grid_search(e, x0, base, m.grid, rule, m.holdout_seed);
    write_text_file(m.out + ".csv", lambda_table_to_csv(sel));
    write_text_file(m.out + ".gp", gnuplot_script({file_name(m.out + ".csv"), "Validation score versus lambda",
                                                   "lambda", m.rule == "oracle" ? "relative error" : "holdout loss",
                                                   1, 2, true, true, ""}));
    out << "lambda=" << format_double(sel.lambda) << " rule=" << m.rule << '\n';
  };
}

// ---------------------------------------------------------------- image

struct ImageOptions {
  std::string input;
  std::string output;
  std::string metrics;
  bool passthrough = false;
  double ratio = 8.0;
  std::string noise = "none";
  std::uint64_t seed = 0;
  double threshold = 0.0;
  Index max_pixels = 16384;
  SolverFlags solver;
  SpectralFlags spectral;
};

void add_image(CLI::App& root, ImageOptions& o, std::map<CLI::App*, std::function<void(std::ostream&)>>& actions) {
  auto* app = root.add_subcommand("image", "Recover a grayscale PGM image from synthetic measurements");
  app->add_option("--input", o.input, "PGM image (P2 or P5)")->required();
  app->add_option("--output", o.output, "Reconstructed PGM to write")->required();
  app->add_option("--metrics", o.metrics, "Metrics JSON to write");
  app->add_flag("--passthrough", o.passthrough, "Read and rewrite the image without solving");
  app->add_option("--ratio", o.ratio, "n/p")->check(kPositive);
  app->add_option("--noise", o.noise, "none | type1:eta | type2:eta | type3:eta | gaussian:eta")
      ->check(kNoiseValidator);
  app->add_option("--seed", o.seed, "Seed for sampling and noise");
  app->add_option("--threshold", o.threshold, "Zero pixels below this value (in [0,1]) at ingestion")
      ->check(kNonNegative);
  app->add_option("--max-pixels", o.max_pixels, "Largest accepted p = width * height")->check(kPositive);
  o.solver.add(app);
  o.spectral.add(app);
  actions[app] = [&o](std::ostream& out) {
    GrayImage img = read_pgm(o.input);
    if (o.passthrough) {
      write_pgm(o.output, img);
      out << "width=" << img.width << " height=" << img.height << " -> " << o.output << '\n';
      return;
    }
    const SolverConfig cfg = o.solver.config();
    const Index p = static_cast<Index>(img.pixels.size());
    check_image_size(p, o.max_pixels);
    if (o.threshold > 1.0) usage("--threshold must lie in [0, 1]");
    for (double& v : img.pixels)
      if (v < o.threshold) v = 0.0;
    RealVector x = image_to_signal(img);
    if (x.norm() == 0.0) usage("image is blank after --threshold");
    const auto n = static_cast<Index>(std::llround(o.ratio * static_cast<double>(p)));
    if (n < 1) usage("--ratio gives n < 1");
    const NoiseSpec noise = parse_noise(o.noise);
    const Signal truth(x);
    const MeasurementEnsemble e = measure_signal(truth, n, noise, o.seed);
    const SpectralConfig sc = o.spectral.config(FieldTag::Real, p, std::nullopt);
    const SolverResult result = solve(e, spectral_init(e, sc, o.seed).estimate, cfg);
    const double rel = relative_error(result.estimate, truth);
    const Signal aligned = align_phase(result.estimate, truth);
    write_pgm(o.output, signal_to_image(aligned.real_values(), img));

    if (!o.metrics.empty()) {
      json doc;
      doc["width"] = img.width;
      doc["height"] = img.height;
      doc["p"] = p;
      doc["n"] = n;
      doc["maxval"] = img.maxval;
      doc["pixel_scale"] = 1.0 / img.maxval;
      doc["threshold"] = o.threshold;
      doc["noise"] = to_string(noise);
      doc["seed"] = o.seed;
      doc["lambda"] = cfg.lambda;
      doc["alpha"] = cfg.alpha;
      doc["termination"] = to_string(result.termination);
      doc["iterations"] = result.iterations();
      doc["final_objective"] = result.final_objective;
      doc["fixed_point_residual"] = result.final_fixed_point_residual;
      doc["relative_error"] = rel;
      write_text_file(o.metrics, doc.dump(2) + "\n");
    }
    out << "p=" << p << " n=" << n << " termination=" << to_string(result.termination)
        << " relative_error=" << format_double(rel) << '\n';
  };
}

// ---------------------------------------------------------------- diag

struct LoadedSolution {
  Signal estimate;
  std::optional<double> lambda;
  std::optional<double> alpha;
};

LoadedSolution read_solution(const std::string& path, const MeasurementEnsemble& e) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& ex) {
    throw ParseError("solution file '" + path + "': " + ex.what());
  }
  if (!doc.is_object() || !doc.contains("estimate")) throw ParseError("missing field: estimate");
  FieldTag field = e.field();
  if (doc.contains("field")) {
    if (!doc["field"].is_string()) throw ParseError("bad value for key: field");
    field = parse_field(doc["field"].get<std::string>());
  }
  if (field != e.field()) throw InvalidArgument("solution field does not match the instance field");
  LoadedSolution sol{detail::signal_from_json(doc["estimate"], "estimate", field, e.p()), {}, {}};
  if (doc.contains("lambda") && doc["lambda"].is_number()) sol.lambda = doc["lambda"].get<double>();
  if (doc.contains("alpha") && doc["alpha"].is_number()) sol.alpha = doc["alpha"].get<double>();
  return sol;
}

struct DiagOptions {
  std::string instance;
  std::string solution;
  std::string out;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> eps1;
  double rho0 = 0.5;
  int samples = 2000;
  std::optional<std::uint64_t> seed;
  bool raw_rows = false;
  SolverFlags solver;
  SpectralFlags spectral;
};

struct DiagAll {
  DiagOptions stability, certificate, remark5;
};

void add_diag(CLI::App& root, DiagAll& o, std::map<CLI::App*, std::function<void(std::ostream&)>>& actions) {
  auto* diag = root.add_subcommand("diag", "Numerical checks of the recovery conditions");
  diag->require_subcommand(1);

  auto* stability = diag->add_subcommand("stability", "Sampled stability constants of a real ensemble");
  {
    auto& m = o.stability;
    stability->add_option("--instance", m.instance, "Instance JSON")->required();
    stability->add_option("--out", m.out, "Report JSON to write")->required();
    stability->add_option("--samples", m.samples, "Random direction pairs")->check(kPositive);
    stability->add_option("--rho0", m.rho0, "Inlier fraction of alpha")->check(open_unit_interval(false));
    stability->add_option("--alpha", m.alpha, "Huber threshold (default 1.345)")->check(kPositive);
    stability->add_option("--seed", m.seed, "Sampling seed (default: instance seed)");
    stability->add_flag("--raw-rows", m.raw_rows, "Use the sampling vectors without row normalization");
  }
  actions[stability] = [&o](std::ostream& out) {
    const auto& m = o.stability;
    const MeasurementEnsemble e = read_instance(m.instance);
    StabilityOptions opts;
    opts.samples = m.samples;
    opts.rho0 = m.rho0;
    opts.alpha = m.alpha.value_or(1.345);
    opts.seed = m.seed.value_or(e.seed());
    opts.normalize_rows = !m.raw_rows;
    const StabilityEstimate est = estimate_stability(e, opts);
    write_text_file(m.out, to_json(est));
    out << "mu_hat=" << format_double(est.mu_hat) << " c2_hat=" << format_double(est.c2_hat) << '\n';
  };

  auto* certificate = diag->add_subcommand("certificate", "Linear-rate certificate at a solution");
  {
    auto& m = o.certificate;
    certificate->add_option("--instance", m.instance, "Instance JSON")->required();
    certificate->add_option("--solution", m.solution, "Result JSON from solve (otherwise solve here)");
    certificate->add_option("--out", m.out, "Report JSON to write")->required();
    certificate->add_option("--eps1", m.eps1, "Boundary half-width (default (1 - rho0) alpha)")
        ->check(kPositive);
    certificate->add_option("--rho0", m.rho0, "Used for the default eps1")->check(open_unit_interval(false));
    m.solver.add(certificate);
    m.spectral.add(certificate);
  }
  actions[certificate] = [&o, certificate](std::ostream& out) {
    const auto& m = o.certificate;
    const MeasurementEnsemble e = read_instance(m.instance);
    const bool alpha_given = certificate->get_option("--alpha")->count() > 0;
    std::optional<Signal> x;
    double lambda = 0.0, alpha = m.solver.alpha;
    if (!m.solution.empty()) {
      LoadedSolution sol = read_solution(m.solution, e);
      if (!m.solver.lambda && !sol.lambda) usage("lambda required (see bench lambda-grid)");
      lambda = m.solver.lambda.value_or(sol.lambda.value_or(0.0));
      if (!alpha_given && sol.alpha) alpha = *sol.alpha;
      x = std::move(sol.estimate);
    } else {
      const SolverConfig cfg = m.solver.config();
      const SpectralConfig sc = m.spectral.config(e.field(), e.p(), std::nullopt);
      x = solve(e, spectral_init(e, sc, e.seed()).estimate, cfg).estimate;
      lambda = cfg.lambda;
    }
    const double eps1 = m.eps1.value_or(default_eps1(alpha, m.rho0));
    const CertificateReport report = linear_rate_certificate(*x, e, lambda, alpha, eps1);
    write_text_file(m.out, to_json(report));
    out << "passed=" << (report.passed ? "true" : "false") << " lhs_min_eig=" << format_double(report.lhs_min_eig)
        << " rhs=" << format_double(report.rhs_boundary_norms + report.rhs_reg_term) << '\n';
  };

  auto* remark5 = diag->add_subcommand("remark5", "Noise-weighted spectral norms near the truth (real instances)");
  {
    auto& m = o.remark5;
    remark5->add_option("--instance", m.instance, "Instance JSON with a noise record")->required();
    remark5->add_option("--solution", m.solution, "Result JSON whose estimate is used (default: x_true)");
    remark5->add_option("--out", m.out, "Report JSON to write")->required();
    remark5->add_option("--alpha", m.alpha, "Huber threshold (default 1.345)")->check(kPositive);
    remark5->add_option("--rho0", m.rho0, "eps1 = (1 - rho0) alpha")->check(open_unit_interval(false));
  }
  actions[remark5] = [&o](std::ostream& out) {
    const auto& m = o.remark5;
    const MeasurementEnsemble e = read_instance(m.instance);
    std::optional<Signal> x;
    if (!m.solution.empty())
      x = read_solution(m.solution, e).estimate;
    else if (e.ground_truth())
      x = *e.ground_truth();
    else
      throw MissingData("remark5 needs --solution or an instance with x_true");
    const Remark5Report report = remark5_quantities(*x, e, m.alpha.value_or(1.345), m.rho0);
    write_text_file(m.out, to_json(report));
    out << "inlier_noise_norm=" << format_double(report.inlier_noise_norm)
        << " boundary_noise_norm=" << format_double(report.boundary_noise_norm)
        << " quadratic_min_eig=" << format_double(report.quadratic_min_eig) << '\n';
  };
}

const CLI::App* selected_leaf(const CLI::App& root) {
  const CLI::App* app = &root;
  for (;;) {
    const auto subs = app->get_subcommands();
    if (subs.empty()) return app;
    app = subs.front();
  }
}

}  // namespace

unsigned thread_budget() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("ROBUSTPR_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  unsigned cap = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, cap);
  if (ec != std::errc() || ptr != end || cap == 0)
    throw InvalidArgument("ROBUSTPR_THREADS must be a positive integer");
  return std::min(hw, cap);
}

void check_image_size(Index p, Index cap) {
  if (p > cap)
    throw InvalidArgument("image has " + std::to_string(p) + " pixels, above the cap of " + std::to_string(cap) +
                          "; downsample it or raise --max-pixels (memory grows like ratio * p^2)");
}

std::string gnuplot_script(const PlotSpec& plot) {
  std::ostringstream out;
  out << "# gnuplot script; run with: gnuplot -persist <this file>\n"
      << "set datafile separator ','\n"
      << "set title '" << plot.title << "'\n"
      << "set xlabel '" << plot.xlabel << "'\n"
      << "set ylabel '" << plot.ylabel << "'\n"
      << "set grid\n";
  if (plot.logx) out << "set logscale x\n";
  if (plot.logy) out << "set logscale y\n";
  if (!plot.yrange.empty()) out << "set yrange " << plot.yrange << '\n';
  out << "plot '" << plot.csv_file << "' every ::1 using " << plot.xcol << ':' << plot.ycol
      << " with linespoints title '" << plot.ylabel << "'\n";
  return out.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust sparse phase retrieval: Huber loss, half-thresholding MM solver, benchmarks", "robustpr"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", "robustpr 0.1.0");
  app.config_formatter(std::make_shared<FlatConfig>(&app));
  app.set_config("--config", "", "Flat key = value file; # starts a comment; command-line flags win");
  app.fallthrough();
  app.require_subcommand(1);

  std::map<CLI::App*, std::function<void(std::ostream&)>> actions;
  GenOptions gen;
  SolveOptions solve_opts;
  BenchOptions bench;
  ImageOptions image;
  DiagAll diag;
  add_gen(app, gen, actions);
  add_solve(app, solve_opts, actions);
  add_bench(app, bench, actions);
  add_image(app, image, actions);
  add_diag(app, diag, actions);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("robustpr");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << selected_leaf(app)->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const auto it = actions.find(const_cast<CLI::App*>(selected_leaf(app)));
    if (it == actions.end()) {
      err << "error: a subcommand is required\n";
      return kExitUsage;
    }
    it->second(out);
  } catch (const MissingData& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const UnsupportedField& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, std::cout, std::cerr);
}

}  // namespace robustpr::cli

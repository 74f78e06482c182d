// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <robustpr/diagnostics.hpp>
#include <robustpr/ensemble.hpp>
#include <robustpr/experiment.hpp>
#include <robustpr/gradient.hpp>
#include <robustpr/instance_io.hpp>
#include <robustpr/metrics.hpp>
#include <robustpr/objective.hpp>
#include <robustpr/prox_half.hpp>
#include <robustpr/random.hpp>
#include <robustpr/solver.hpp>
#include <robustpr/spectral.hpp>
#include <robustpr_cli/cli.hpp>
#include <robustpr_cli/pgm.hpp>

#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace robustpr;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Post-conditions checked on every solve performed by this suite.
struct SolveAudit {
  long solves = 0;
  long descent_violations = 0;
  long summability_violations = 0;
  long converged = 0;
  long residual_violations = 0;
  double worst_residual_ratio = 0.0;

  void check(const SolverResult& r, const SolverConfig& cfg) {
    ++solves;
    double prev = r.initial_objective;
    double sum_sq = 0.0;
    for (const auto& rec : r.trace) {
      if (!(prev - rec.F_value >= cfg.delta * rec.step_norm * rec.step_norm)) ++descent_violations;
      sum_sq += rec.step_norm * rec.step_norm;
      prev = rec.F_value;
    }
    if (!(sum_sq <= 2.0 * r.initial_objective / cfg.delta)) ++summability_violations;
    if (r.termination == Termination::Converged) {
      ++converged;
      const double ratio = r.final_fixed_point_residual / cfg.epsilon;
      worst_residual_ratio = std::max(worst_residual_ratio, ratio);
      if (!(ratio <= 10.0)) ++residual_violations;
    }
  }
};

SolveAudit audit;

SolverResult audited_solve(const MeasurementEnsemble& e, const Signal& x0, const SolverConfig& cfg) {
  SolverResult r = solve(e, x0, cfg);
  audit.check(r, cfg);
  return r;
}

const std::vector<double> kLambdaGrid{1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
constexpr double kSuccess = 5e-3;

struct TrialOutcome {
  double error;
  double lambda;
};

// One Monte Carlo trial: spectral start, then the oracle choice over the grid
// (smallest relative error, ties to the larger lambda).
TrialOutcome oracle_trial(Index p, Index s, Index n, FieldTag field, const NoiseSpec& noise, double alpha,
                          std::uint64_t master, int trial) {
  const std::uint64_t seed = trial_seed(master, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
  const auto e = synthesize_instance(p, s, n, field, noise, seed);
  const Signal x0 = spectral_init(e, default_spectral_config(field, p, s), seed).estimate;
  TrialOutcome best{std::numeric_limits<double>::infinity(), 0.0};
  for (double lambda : kLambdaGrid) {
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.alpha = alpha;
    const SolverResult r = audited_solve(e, x0, cfg);
    const double err = r.termination == Termination::LineSearchFailed ? std::numeric_limits<double>::infinity()
                                                                      : relative_error(r.estimate, *e.ground_truth());
    if (err <= best.error) best = {err, lambda};
  }
  return best;
}

std::vector<TrialOutcome> oracle_trials(Index p, Index s, Index n, FieldTag field, const NoiseSpec& noise,
                                        double alpha, std::uint64_t master, int trials) {
  std::vector<TrialOutcome> out;
  for (int t = 0; t < trials; ++t) out.push_back(oracle_trial(p, s, n, field, noise, alpha, master, t));
  return out;
}

double success_rate(const std::vector<TrialOutcome>& v) {
  const auto hits = std::count_if(v.begin(), v.end(), [](const TrialOutcome& t) { return t.error < kSuccess; });
  return static_cast<double>(hits) / static_cast<double>(v.size());
}

double median_error(const std::vector<TrialOutcome>& v) {
  std::vector<double> e;
  for (const auto& t : v) e.push_back(t.error);
  std::sort(e.begin(), e.end());
  const std::size_t m = e.size() / 2;
  return e.size() % 2 ? e[m] : 0.5 * (e[m - 1] + e[m]);
}

// 1
Outcome prox_oracle() {
  Outcome o;
  Rng rng(20261);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double mu = std::exp(rng.uniform(std::log(0.01), std::log(10.0)));
    const double scale = rng.uniform(0.0, 3.0) * HalfThresholdParams{mu}.threshold();
    if (k % 2 == 0) {
      const double t = rng.uniform01() < 0.5 ? -scale : scale;
      worst = std::max(worst, std::abs(chi(t, mu) - chi_oracle(t, mu, 1e-6)));
    } else {
      const Complex t = std::polar(scale, rng.uniform(0.0, 2.0 * std::numbers::pi));
      worst = std::max(worst, std::abs(chi(t, mu) - chi_oracle(t, mu, 1e-6)));
    }
  }
  o.pass = worst <= 1e-5;

  int boundary_bad = 0;
  for (double mu : {0.05, 0.7, 1.0, 4.0}) {
    const double tbar = HalfThresholdParams{mu}.threshold();
    for (double sign : {1.0, -1.0}) {
      if (chi(sign * 0.999 * tbar, mu) != 0.0) ++boundary_bad;
      if (chi(sign * tbar, mu) != 0.0) ++boundary_bad;
      const double above = chi(sign * 1.001 * tbar, mu);
      if (!(sign * above > 0.0) || std::abs(above - chi_oracle(sign * 1.001 * tbar, mu, 1e-6)) > 1e-5) ++boundary_bad;
    }
    const Complex phase = std::polar(1.0, 0.3);
    if (chi(0.999 * tbar * phase, mu) != Complex(0.0) || chi(tbar * phase, mu) != Complex(0.0)) ++boundary_bad;
    if (std::abs(chi(1.001 * tbar * phase, mu)) < 0.5 * tbar) ++boundary_bad;
  }
  o.pass = o.pass && boundary_bad == 0;
  o.detail = "max |chi - oracle| = " + fmt(worst) + ", boundary violations = " + std::to_string(boundary_bad);
  return o;
}

// 2
Outcome gradient_fd() {
  Rng rng(20262);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index p = 1 + static_cast<Index>(rng.index(8));
    const Index n = 4 + static_cast<Index>(rng.index(29));
    const double alpha = rng.uniform(0.2, 2.0);
    if (k % 2 == 0) {
      const auto e = synthesize_instance(p, 1, n, FieldTag::Real, parse_noise("type2:0.2"), rng.next());
      const Signal x = generate_signal(p, p, FieldTag::Real, rng.next());
      const Eigen::VectorXd fd = oracle::central_difference(
          [&](const Eigen::VectorXd& v) { return oracle::loss(e, Signal(RealVector(v)), alpha); }, x.real_values());
      const Eigen::VectorXd an = 2.0 * g(x, e, alpha).real_values();
      worst = std::max(worst, (an - fd).norm() / std::max(1.0, fd.norm()));
    } else {
      const auto e = synthesize_instance(p, 1, n, FieldTag::Complex, parse_noise("type1:0.2"), rng.next());
      const Signal x = generate_signal(p, p, FieldTag::Complex, rng.next());
      const Eigen::VectorXd fd = oracle::central_difference(
          [&](const Eigen::VectorXd& v) { return oracle::loss_realified(e, v, alpha); }, realify(x.complex_values()));
      const Eigen::VectorXd an = realify_gradient(x, e, alpha);
      worst = std::max(worst, (an - fd).norm() / std::max(1.0, fd.norm()));
    }
  }
  return {worst <= 1e-5, "max relative gap = " + fmt(worst) + " over 50 instances"};
}

std::vector<TrialOutcome> noiseless_real, noiseless_complex;

// 5
Outcome noiseless_recovery() {
  noiseless_real = oracle_trials(64, 6, 8 * 64, FieldTag::Real, NoiseSpec::none(), 1.345, 5, 20);
  noiseless_complex = oracle_trials(32, 4, 10 * 32, FieldTag::Complex, NoiseSpec::none(), 1.345, 5, 20);
  const double real_rate = success_rate(noiseless_real);
  const double complex_rate = success_rate(noiseless_complex);
  return {real_rate >= 0.9 && complex_rate >= 0.8,
          "real success " + fmt(real_rate) + " (need 0.9), complex success " + fmt(complex_rate) + " (need 0.8)"};
}

// 6
Outcome robustness() {
  const double clean = median_error(noiseless_real);
  const auto outliers = oracle_trials(64, 6, 8 * 64, FieldTag::Real, parse_noise("type3:0.1"), 0.1345, 5, 20);
  const auto gaussian = oracle_trials(64, 6, 8 * 64, FieldTag::Real, parse_noise("gaussian:0.01"), 1.345, 5, 20);
  const double outlier_median = median_error(outliers);
  const double gaussian_median = median_error(gaussian);
  return {outlier_median <= 5.0 * clean && gaussian_median <= 0.05,
          "noiseless median " + fmt(clean) + ", type3 median " + fmt(outlier_median) + " (limit " +
              fmt(5.0 * clean) + "), gaussian median " + fmt(gaussian_median) + " (limit 0.05)"};
}

// 7
Outcome phase_metric() {
  Rng rng(20267);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index p = 1 + static_cast<Index>(rng.index(16));
    ComplexVector x(p), xh(p);
    for (Index j = 0; j < p; ++j) x[j] = rng.complex_normal();
    for (Index j = 0; j < p; ++j) xh[j] = rng.complex_normal();
    worst = std::max(worst, std::abs(relative_error(Signal(xh), Signal(x)) - oracle::relative_error_grid(xh, x)));
  }
  int nonzero = 0;
  double rotated_worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    ComplexVector x(8);
    for (Index j = 0; j < 8; ++j) x[j] = rng.complex_normal();
    const Complex rot = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
    if (relative_error(Signal(x), Signal(x)) != 0.0) ++nonzero;
    if (relative_error(Signal(ComplexVector(-x)), Signal(x)) != 0.0) ++nonzero;
    // rotations only up to rounding
    rotated_worst = std::max(rotated_worst, relative_error(Signal(ComplexVector(rot * x)), Signal(x)));
    const RealVector r = x.real();
    if (relative_error(Signal(r), Signal(r)) != 0.0) ++nonzero;
    if (relative_error(Signal(RealVector(-r)), Signal(r)) != 0.0) ++nonzero;
  }
  return {worst <= 1e-9 && nonzero == 0 && rotated_worst <= 1e-15,
          "max |closed form - grid| = " + fmt(worst) + ", nonzero distances to x and -x = " +
              std::to_string(nonzero) + ", max distance to rotations = " + fmt(rotated_worst)};
}

// 8
Outcome certificate() {
  const auto e = synthesize_instance(16, 2, 20 * 16, FieldTag::Real, NoiseSpec::none(), 1);
  SolverConfig cfg;
  cfg.lambda = 1e-4;
  const Signal x0 = spectral_init(e, default_spectral_config(FieldTag::Real, 16, 2), 1).estimate;
  const SolverResult r = audited_solve(e, x0, cfg);
  if (r.termination != Termination::Converged) return {false, "solve did not converge: " + to_string(r.termination)};
  const double eps1 = default_eps1(cfg.alpha);
  const auto ok = linear_rate_certificate(r.estimate, e, cfg.lambda, cfg.alpha, eps1);
  const auto flipped = linear_rate_certificate(r.estimate, e, cfg.lambda * 1e6, cfg.alpha, eps1);
  return {ok.passed && !flipped.passed,
          "lambda_min " + fmt(ok.lhs_min_eig) + " vs rhs " + fmt(ok.rhs_boundary_norms + ok.rhs_reg_term) +
              "; scaled rhs " + fmt(flipped.rhs_boundary_norms + flipped.rhs_reg_term) +
              (flipped.passed ? " (still passes)" : " (fails)")};
}

// 9
Outcome non_equivalence() {
  Rng rng(20269);
  int strict_failures = 0;
  int differing = 0;
  for (int k = 0; k < 100; ++k) {
    Complex v = rng.complex_normal();
    if (v.real() == 0.0 || v.imag() == 0.0) v += Complex(0.5, 0.5);
    const double split = std::sqrt(std::abs(v.real())) + std::sqrt(std::abs(v.imag()));
    if (!(split > std::sqrt(std::abs(v)))) ++strict_failures;

    const double mu = rng.uniform(0.1, 2.0);
    ComplexVector one(1);
    one[0] = v;
    const Complex joint = half_threshold(Signal(one), mu).complex_values()[0];
    const Complex separate(chi(v.real(), mu), chi(v.imag(), mu));
    if (joint != separate) ++differing;
  }
  return {strict_failures == 0 && differing > 0, "strict inequality failures = " + std::to_string(strict_failures) +
                                                     ", inputs where the two maps differ = " +
                                                     std::to_string(differing) + "/100"};
}

// 10
struct CommandRun {
  std::string name;
  std::vector<std::string> args;  // "@/" is replaced by the run directory
  std::vector<std::string> outputs;
  const char* threads = nullptr;
};

Outcome determinism(const fs::path& root) {
  fs::remove_all(root);
  const fs::path inputs = root / "inputs";
  fs::create_directories(inputs);
  const std::string real_inst = (inputs / "real.json").string();
  const std::string cx_inst = (inputs / "complex.json").string();
  const std::string img = (inputs / "img.pgm").string();
  std::ostringstream sink;
  if (cli::run({"gen", "--p", "16", "--s", "2", "--n", "320", "--seed", "1", "--out", real_inst}, sink, sink) != 0 ||
      cli::run({"gen", "--p", "8", "--s", "2", "--n", "64", "--field", "complex", "--noise", "type1:0.1", "--seed", "2",
                "--out", cx_inst},
               sink, sink) != 0)
    return {false, "could not generate inputs"};
  cli::GrayImage image;
  image.width = 6;
  image.height = 5;
  image.maxval = 255;
  image.pixels.assign(30, 0.0);
  image.pixels[4] = 1.0;
  image.pixels[17] = 0.5;
  image.pixels[22] = 0.25;
  cli::write_pgm(img, image);

  const std::vector<CommandRun> commands{
      {"gen", {"gen", "--p", "32", "--s", "3", "--n", "100", "--noise", "type2:0.1", "--seed", "9", "--out", "@/g.json"},
       {"g.json"}},
      {"solve",
       {"solve", "--instance", real_inst, "--lambda", "1e-4", "--out", "@/r.json", "--trace", "@/t.csv"},
       {"r.json", "t.csv"}},
      {"solve complex", {"solve", "--instance", cx_inst, "--lambda", "1e-3", "--out", "@/rc.json"}, {"rc.json"}},
      {"bench success-rate",
       {"bench", "success-rate", "--p", "16", "--s", "2", "--grid", "2,4", "--trials", "4", "--noise", "type3:0.1",
        "--lambda", "1e-3", "--seed", "3", "--out", "@/sr"},
       {"sr.records.csv", "sr.summary.csv", "sr.json", "sr.gp"},
       "3"},
      {"bench consistency",
       {"bench", "consistency", "--p", "16", "--s", "2", "--grid", "4,6", "--trials", "3", "--noise", "gaussian:0.01",
        "--lambda-grid", "1e-4,1e-3", "--out", "@/co"},
       {"co.records.csv", "co.summary.csv", "co.json", "co.gp"},
       "2"},
      {"bench error-iter", {"bench", "error-iter", "--instance", real_inst, "--lambda", "1e-4", "--out", "@/ei"},
       {"ei.csv", "ei.gp"}},
      {"bench lambda-grid",
       {"bench", "lambda-grid", "--instance", real_inst, "--grid", "1e-5,1e-3", "--rule", "holdout", "--out", "@/lg"},
       {"lg.csv", "lg.gp"}},
      {"image",
       {"image", "--input", img, "--output", "@/o.pgm", "--metrics", "@/o.json", "--lambda", "1e-4", "--seed", "4"},
       {"o.pgm", "o.json"}},
      {"image passthrough", {"image", "--passthrough", "--input", img, "--output", "@/pt.pgm"}, {"pt.pgm"}},
      {"diag stability",
       {"diag", "stability", "--instance", real_inst, "--samples", "200", "--seed", "5", "--out", "@/st.json"},
       {"st.json"}},
      {"diag certificate", {"diag", "certificate", "--instance", real_inst, "--lambda", "1e-4", "--out", "@/ce.json"},
       {"ce.json"}},
      {"diag remark5", {"diag", "remark5", "--instance", real_inst, "--out", "@/r5.json"}, {"r5.json"}},
  };

  std::vector<std::string> problems;
  for (const auto& cmd : commands) {
    std::string contents[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / ("run" + std::to_string(rep)) / std::to_string(&cmd - commands.data());
      fs::create_directories(dir);
      std::vector<std::string> args;
      for (const auto& a : cmd.args)
        args.push_back(a.rfind("@/", 0) == 0 ? (dir / a.substr(2)).string() : a);
      // Second run uses a different thread budget where the command is parallel.
      if (cmd.threads && rep == 1) ::setenv("ROBUSTPR_THREADS", cmd.threads, 1);
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      ::unsetenv("ROBUSTPR_THREADS");
      if (code != 0) {
        problems.push_back(cmd.name + " exited " + std::to_string(code) + ": " + err.str());
        break;
      }
      for (const auto& f : cmd.outputs) contents[rep] += f + "\n" + read_text_file((dir / f).string());
    }
    if (contents[0] != contents[1]) problems.push_back(cmd.name + " output differs between runs");
  }
  std::string detail = std::to_string(commands.size()) + " commands rerun";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "robustpr_acceptance";
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "prox oracle equivalence", 10.0, prox_oracle},
      {2, "gradient finite differences", 10.0, gradient_fd},
      {5, "noiseless recovery", 120.0, noiseless_recovery},
      {6, "robustness ordering", 0.0, robustness},
      {7, "phase-alignment metric", 0.0, phase_metric},
      {8, "certificate sanity", 5.0, certificate},
      {9, "half-norm non-equivalence", 0.0, non_equivalence},
      {10, "determinism", 0.0, [&] { return determinism(scratch); }},
  };

  struct Line {
    int id;
    std::string text;
    bool pass;
  };
  std::vector<Line> lines;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string detail = o.detail + " [" + fmt(secs) + " s";
    if (c.budget_seconds > 0.0) {
      detail += ", budget " + fmt(c.budget_seconds) + " s";
      if (secs > c.budget_seconds) o.pass = false;
    }
    detail += "]";
    lines.push_back({c.id, std::string(c.name) + ": " + detail, o.pass});
  }

  // 3 and 4 are post-conditions over every solve made above.
  lines.push_back({3, "descent and square-summability: " + std::to_string(audit.solves) + " solves, " +
                          std::to_string(audit.descent_violations) + " descent violations, " +
                          std::to_string(audit.summability_violations) + " summability violations",
                   audit.solves > 0 && audit.descent_violations == 0 && audit.summability_violations == 0});
  lines.push_back({4, "fixed-point inclusion: " + std::to_string(audit.converged) + " converged solves, worst residual " +
                          fmt(audit.worst_residual_ratio) + " x epsilon, " +
                          std::to_string(audit.residual_violations) + " above 10 x epsilon",
                   audit.converged > 0 && audit.residual_violations == 0});

  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  bool all = true;
  for (const auto& l : lines) {
    std::printf("%s criterion %d (%s)\n", l.pass ? "PASS" : "FAIL", l.id, l.text.c_str());
    all = all && l.pass;
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}

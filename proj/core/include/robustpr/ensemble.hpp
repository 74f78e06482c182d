#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "robustpr/signal.hpp"

namespace robustpr {

/// Sampling vectors a_i (rows), observations b_i = |<a_i, x>|^2 + eps_i and,
/// for synthetic instances, the ground truth and the noise that was added.
///
/// Inner products are <a, x> = a^H x throughout the library.
class MeasurementEnsemble {
 public:
  MeasurementEnsemble(RealMatrix sampling, RealVector observations, std::optional<Signal> ground_truth = std::nullopt,
                      std::optional<RealVector> noise_record = std::nullopt, std::uint64_t seed = 0);
  MeasurementEnsemble(ComplexMatrix sampling, RealVector observations,
                      std::optional<Signal> ground_truth = std::nullopt,
                      std::optional<RealVector> noise_record = std::nullopt, std::uint64_t seed = 0);

  FieldTag field() const noexcept {
    return std::holds_alternative<RealMatrix>(sampling_) ? FieldTag::Real : FieldTag::Complex;
  }
  Index n() const noexcept { return observations_.size(); }
  Index p() const noexcept;
  std::uint64_t seed() const noexcept { return seed_; }

  template <class Scalar>
  const Mat<Scalar>& sampling() const;

  const RealVector& observations() const noexcept { return observations_; }
  const std::optional<Signal>& ground_truth() const noexcept { return ground_truth_; }
  const std::optional<RealVector>& noise_record() const noexcept { return noise_record_; }

  /// Copy restricted to the given rows (ascending order preserved as given).
  MeasurementEnsemble subset(const std::vector<Index>& rows) const;
  /// Same sampling vectors with replaced observations; drops the noise record.
  MeasurementEnsemble with_observations(RealVector b) const;

  /// Throws InvalidArgument unless x has this ensemble's field and length p.
  void check_compatible(const Signal& x) const;

  friend bool operator==(const MeasurementEnsemble& a, const MeasurementEnsemble& b);

 private:
  void validate() const;

  std::variant<RealMatrix, ComplexMatrix> sampling_;
  RealVector observations_;
  std::optional<Signal> ground_truth_;
  std::optional<RealVector> noise_record_;
  std::uint64_t seed_ = 0;
};

/// Dispatches `fn(const Mat<S>& A, const Vec<S>& x)` after checking that x
/// and the ensemble share field and dimension.
template <class Fn>
decltype(auto) visit(const MeasurementEnsemble& e, const Signal& x, Fn&& fn) {
  e.check_compatible(x);
  if (e.field() == FieldTag::Real) return fn(e.sampling<double>(), x.values<double>());
  return fn(e.sampling<Complex>(), x.values<Complex>());
}

/// |<a_i, x>|^2 for every row.
RealVector clean_measurements(const MeasurementEnsemble& e, const Signal& x);
template <class Scalar>
RealVector clean_measurements(const Mat<Scalar>& sampling, const Vec<Scalar>& x);

enum class NoiseKind { None, TypeI, TypeII, TypeIII, Gaussian };

/// Corruption model and its intensity eta >= 0.
///  TypeI     eps_i ~ U(0, eta ||x||^2)
///  TypeII    eps_i ~ Laplace(0, mu / sqrt 2), mu = eta sqrt(sum clean_b^2 / n)
///  TypeIII   with probability eta, b_i is replaced by a U(0, ||x||^2) draw
///  Gaussian  eps_i = eta ||clean_b|| / sqrt(n) w_i, w_i ~ N(0, 1)
struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double eta = 0.0;

  static NoiseSpec none() { return {}; }
  void validate() const;
};

/// "none", "type1:0.1", "type2:0.1", "type3:0.1", "gaussian:0.01".
NoiseSpec parse_noise(std::string_view text);
std::string to_string(const NoiseSpec& spec);

struct NoisyObservations {
  RealVector b;
  RealVector eps;
};

/// s-sparse signal; support uniform without replacement, values standard
/// (complex) normal drawn in ascending support order.
Signal generate_signal(Index p, Index s, FieldTag field, std::uint64_t seed);
/// n x p matrix of i.i.d. standard (complex) normal entries, row-major draw order.
RealMatrix generate_real_sampling(Index p, Index n, std::uint64_t seed);
ComplexMatrix generate_complex_sampling(Index p, Index n, std::uint64_t seed);

NoisyObservations apply_noise(const RealVector& clean_b, const Signal& x_true, const NoiseSpec& spec,
                              std::uint64_t seed);

/// Gaussian sampling of a given signal plus noise, drawn from the sampling and
/// noise sub-streams of `seed`.
MeasurementEnsemble measure_signal(const Signal& x, Index n, const NoiseSpec& spec, std::uint64_t seed);

/// Signal, sampling and noise come from independent sub-streams of `seed`.
MeasurementEnsemble synthesize_instance(Index p, Index s, Index n, FieldTag field, const NoiseSpec& spec,
                                        std::uint64_t seed);

}  // namespace robustpr

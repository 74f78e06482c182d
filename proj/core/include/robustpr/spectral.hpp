#pragma once

#include <cstdint>
#include <optional>

#include "robustpr/ensemble.hpp"

namespace robustpr {

struct SpectralConfig {
  int power_iterations = 200;
  double power_tol = 1e-8;
  /// Keep only this many largest-modulus entries of the direction.
  std::optional<Index> truncation;

  void validate(Index p) const;
};

struct SpectralInit {
  Signal estimate;
  /// Set when every b_i is zero; the estimate is then the zero signal.
  bool degenerate = false;
  int iterations = 0;
  /// Rayleigh quotient of Y after each power step (nondecreasing for PSD Y).
  std::vector<double> rayleigh;
};

/// sqrt(mean b) times the leading eigenvector of Y = (1/n) sum_i b_i a_i a_i^H,
/// found by matrix-free power iteration from a seeded random start. Stops
/// after cfg.power_iterations steps or once 1 - |<v_k, v_{k+1}>| < power_tol.
SpectralInit spectral_init(const MeasurementEnsemble& e, const SpectralConfig& cfg, std::uint64_t seed);

/// Truncation min(2s, p) for complex ensembles with known sparsity, none otherwise.
SpectralConfig default_spectral_config(FieldTag field, Index p, std::optional<Index> sparsity);

}  // namespace robustpr

#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include <robustpr/errors.hpp>
#include <robustpr/spectral.hpp>

#include "oracles.hpp"

using namespace robustpr;

TEST_SUITE("init-spectral") {

TEST_CASE("zero observations give the zero signal") {
  const MeasurementEnsemble e(generate_real_sampling(6, 20, 1), RealVector::Zero(20));
  const auto init = spectral_init(e, {}, 1);
  CHECK(init.degenerate);
  CHECK(init.estimate == Signal::zeros(FieldTag::Real, 6));
}

TEST_CASE("aligns with a coordinate signal") {
  int aligned = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RealVector x = RealVector::Zero(16);
    x[0] = 1.0;
    RealMatrix a = generate_real_sampling(16, 800, seed);
    RealVector b = clean_measurements(a, x);
    const MeasurementEnsemble e(std::move(a), std::move(b), Signal(x), RealVector(RealVector::Zero(800)), seed);
    const Signal init = spectral_init(e, {}, seed).estimate;
    aligned += std::abs(init.real_values().dot(x)) / init.norm() >= 0.9;
  }
  CHECK(aligned >= 9);
}

TEST_CASE("truncation keeps at most the requested entries") {
  const auto e = synthesize_instance(32, 3, 320, FieldTag::Complex, NoiseSpec::none(), 4);
  const SpectralConfig cfg = default_spectral_config(FieldTag::Complex, 32, 3);
  REQUIRE(cfg.truncation);
  CHECK(*cfg.truncation == 6);
  CHECK(spectral_init(e, cfg, 4).estimate.support_size() <= 6);
  CHECK(!default_spectral_config(FieldTag::Real, 32, 3).truncation);
  CHECK(*default_spectral_config(FieldTag::Complex, 4, 3).truncation == 4);
}

TEST_CASE("scale and monotone Rayleigh quotients") {
  for (FieldTag field : {FieldTag::Real, FieldTag::Complex}) {
    const auto e = synthesize_instance(20, 4, 120, field, parse_noise("type1:0.1"), 5);
    const auto init = spectral_init(e, {}, 5);
    const double scale = std::sqrt(e.observations().mean());
    CHECK(std::abs(init.estimate.norm() - scale) <= 1e-12 * scale);
    for (std::size_t k = 1; k < init.rayleigh.size(); ++k)
      CHECK(init.rayleigh[k] >= init.rayleigh[k - 1] - 1e-12 * std::abs(init.rayleigh[k]));
  }
}

TEST_CASE("power iteration agrees with a dense eigensolver") {
  const auto real = synthesize_instance(12, 2, 240, FieldTag::Real, NoiseSpec::none(), 6);
  SpectralConfig tight;
  tight.power_iterations = 5000;
  tight.power_tol = 1e-14;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(oracle::spectral_matrix<double>(real));
  const RealVector top = dense.eigenvectors().col(11);
  const Signal init = spectral_init(real, tight, 6).estimate;
  CHECK(std::abs(top.dot(init.real_values())) / init.norm() >= 1.0 - 1e-6);

  const auto cplx = synthesize_instance(10, 2, 200, FieldTag::Complex, NoiseSpec::none(), 7);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> cdense(oracle::spectral_matrix<Complex>(cplx));
  const ComplexVector ctop = cdense.eigenvectors().col(9);
  const Signal cinit = spectral_init(cplx, tight, 7).estimate;
  CHECK(std::abs(ctop.dot(cinit.complex_values())) / cinit.norm() >= 1.0 - 1e-6);
}

TEST_CASE("global phase of the truth does not matter") {
  const Signal x = generate_signal(12, 3, FieldTag::Complex, 1);
  const ComplexMatrix a = generate_complex_sampling(12, 90, 2);
  const ComplexVector rotated = std::polar(1.0, 0.7) * x.complex_values();
  const RealVector b1 = clean_measurements(a, x.complex_values());
  const RealVector b2 = clean_measurements(a, rotated);
  CHECK((b1 - b2).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + b1.maxCoeff()));
  const MeasurementEnsemble e1(a, b1), e2(a, b1);
  CHECK(spectral_init(e1, {}, 3).estimate == spectral_init(e2, {}, 3).estimate);
  const MeasurementEnsemble e3(a, b2);
  CHECK((spectral_init(e1, {}, 3).estimate.complex_values() - spectral_init(e3, {}, 3).estimate.complex_values())
            .norm() <= 1e-8);
}

TEST_CASE("config validation") {
  SpectralConfig cfg;
  cfg.power_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(5), InvalidArgument);
  cfg = {};
  cfg.truncation = 6;
  CHECK_THROWS_AS(cfg.validate(5), InvalidArgument);
  cfg.truncation = 0;
  CHECK_THROWS_AS(cfg.validate(5), InvalidArgument);
}

}  // TEST_SUITE

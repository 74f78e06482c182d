#include <doctest.h>

#include <cmath>

#include <robustpr/ensemble.hpp>
#include <robustpr/errors.hpp>
#include <robustpr/gradient.hpp>
#include <robustpr/objective.hpp>
#include <robustpr/random.hpp>

#include "oracles.hpp"

using namespace robustpr;
using doctest::Approx;

TEST_SUITE("objective") {

TEST_CASE("huber examples") {
  CHECK(huber(0.0, 1.345) == 0.0);
  CHECK(huber(1.0, 1.345) == 0.5);
  CHECK(huber(2.0, 1.345) == Approx(1.345 * 2.0 - 1.345 * 1.345 / 2.0).epsilon(1e-15));
  CHECK(huber(2.0, 1.345) == Approx(1.785487).epsilon(1e-6));
}

TEST_CASE("huber_deriv examples") {
  CHECK(huber_deriv(0.5, 1.345) == 0.5);
  CHECK(huber_deriv(10.0, 1.345) == 1.345);
  CHECK(huber_deriv(-2.0, 1.345) == -1.345);
  CHECK(huber_deriv(1.345, 1.345) == 1.345);
  CHECK(huber_deriv(-1.345, 1.345) == -1.345);
}

TEST_CASE("huber properties on sampled inputs") {
  Rng rng(1);
  for (int k = 0; k < 2000; ++k) {
    const double alpha = rng.uniform(0.05, 3.0);
    const double u = rng.uniform(-10.0, 10.0), v = rng.uniform(-10.0, 10.0);
    CHECK(std::abs(huber_deriv(u, alpha) - huber_deriv(v, alpha)) <= std::abs(u - v));
    CHECK(std::abs(huber_deriv(u, alpha)) <= alpha);
    CHECK(huber(u, alpha) == huber(-u, alpha));
    CHECK(alpha * std::abs(u) - alpha * alpha / 2.0 <= huber(u, alpha));
    CHECK(huber(u, alpha) <= alpha * std::abs(u));
  }
  // Continuity and slope matching at the transition.
  const double a = 0.7, h = 1e-7;
  CHECK(huber(a + h, a) - huber(a - h, a) == Approx(2.0 * h * a).epsilon(1e-6));
}

TEST_CASE("half_norm examples") {
  RealVector r(3);
  r << 4.0, 0.0, 9.0;
  CHECK(half_norm(Signal(r)) == 5.0);
  ComplexVector c(1);
  c << Complex(3.0, 4.0);
  CHECK(half_norm(Signal(c)) == Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK(half_norm(Signal::zeros(FieldTag::Complex, 4)) == 0.0);
}

TEST_CASE("modulus inequality behind the complex half norm") {
  Rng rng(2);
  for (int k = 0; k < 1000; ++k) {
    const Complex v(rng.normal(), rng.normal());
    if (v.real() * v.imag() == 0.0) continue;
    CHECK(std::sqrt(std::abs(v.real())) + std::sqrt(std::abs(v.imag())) > std::sqrt(std::abs(v)));
  }
}

TEST_CASE("loss examples") {
  const auto e = synthesize_instance(10, 2, 40, FieldTag::Real, NoiseSpec::none(), 3);
  CHECK(loss(*e.ground_truth(), e, 1.345) == 0.0);

  const MeasurementEnsemble ones(generate_real_sampling(5, 7, 1), RealVector::Ones(7));
  CHECK(loss(Signal::zeros(FieldTag::Real, 5), ones, 1.345) == 0.5);

  for (FieldTag field : {FieldTag::Real, FieldTag::Complex}) {
    const auto noisy = synthesize_instance(9, 3, 37, field, parse_noise("type2:0.2"), 4);
    const Signal x = generate_signal(9, 9, field, 99);
    const double expected = oracle::loss(noisy, x, 0.8);
    CHECK(loss(x, noisy, 0.8) == Approx(expected).epsilon(1e-14));
    CHECK(loss(x, noisy, 0.8) >= 0.0);
  }
  CHECK_THROWS_AS(loss(Signal::zeros(FieldTag::Complex, 10), e, 1.0), InvalidArgument);
  CHECK_THROWS_AS(loss(Signal::zeros(FieldTag::Real, 11), e, 1.0), InvalidArgument);
}

TEST_CASE("objective examples") {
  const auto e = synthesize_instance(12, 3, 60, FieldTag::Complex, NoiseSpec::none(), 8);
  const ObjectiveParams params{{1.345}, 0.01};
  const Signal& truth = *e.ground_truth();
  CHECK(objective(truth, e, params) == Approx(0.01 * half_norm(truth)).epsilon(1e-14));

  const MeasurementEnsemble zero_b(generate_real_sampling(4, 6, 2), RealVector::Zero(6));
  CHECK(objective(Signal::zeros(FieldTag::Real, 4), zero_b, params) == 0.0);

  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    const Signal x = generate_signal(12, 4, FieldTag::Complex, rng.next());
    CHECK(objective(x, e, params) >= params.lambda * half_norm(x));
  }
}

TEST_CASE("objective grows along rays") {
  const auto e = synthesize_instance(8, 2, 30, FieldTag::Real, parse_noise("type1:0.1"), 6);
  const ObjectiveParams params{{1.345}, 0.1};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Signal x = generate_signal(8, 8, FieldTag::Real, seed);
    double previous = objective(Signal(RealVector(4.0 * x.real_values())), e, params);
    for (double c = 5.0; c < 60.0; c += 1.0) {
      const double value = objective(Signal(RealVector(c * x.real_values())), e, params);
      CHECK(value > previous);
      previous = value;
    }
  }
}

TEST_CASE("surrogate examples") {
  const auto e = synthesize_instance(10, 3, 50, FieldTag::Complex, parse_noise("type1:0.2"), 12);
  const ObjectiveParams params{{1.345}, 0.05};
  const Signal y = generate_signal(10, 10, FieldTag::Complex, 1);
  CHECK(surrogate(y, y, e, params, 0.3) == Approx(objective(y, e, params)).epsilon(1e-14));
  CHECK_THROWS_AS(surrogate(y, y, e, params, 0.0), InvalidArgument);
  CHECK_THROWS_AS(surrogate(y, y, e, params, -1.0), InvalidArgument);

  // lambda = 0 and g(y) = 0 (y = x_true on a noiseless instance), tau = 1.
  const auto clean = synthesize_instance(6, 2, 30, FieldTag::Real, NoiseSpec::none(), 2);
  const Signal& truth = *clean.ground_truth();
  const ObjectiveParams flat{{1.345}, 0.0};
  const Signal x = generate_signal(6, 6, FieldTag::Real, 3);
  const double expected = loss(truth, clean, 1.345) + 0.5 * (x.real_values() - truth.real_values()).squaredNorm();
  CHECK(surrogate(x, truth, clean, flat, 1.0) == Approx(expected).epsilon(1e-14));
}

TEST_CASE("surrogate majorizes the objective for small steps") {
  for (FieldTag field : {FieldTag::Real, FieldTag::Complex}) {
    const auto e = synthesize_instance(6, 2, 24, field, parse_noise("type2:0.1"), 21);
    const double alpha = 1.345, radius = 2.0;
    // Local Lipschitz constant of g on the ball of the given radius.
    double lip = 0.0;
    visit(e, Signal::zeros(field, 6), [&](const auto& a, const auto&) {
      for (Index i = 0; i < a.rows(); ++i) {
        const double r2 = a.row(i).squaredNorm();
        lip += alpha * r2 + 2.0 * radius * radius * r2 * r2;
      }
    });
    lip /= static_cast<double>(e.n());
    const double tau = 1.0 / (2.0 * lip);
    const ObjectiveParams params{{alpha}, 0.05};
    Rng rng(field == FieldTag::Real ? 1 : 2);
    for (int k = 0; k < 100; ++k) {
      Signal x = generate_signal(6, 6, field, rng.next());
      Signal y = generate_signal(6, 6, field, rng.next());
      const double sx = rng.uniform(0.0, radius) / x.norm(), sy = rng.uniform(0.0, radius) / y.norm();
      if (field == FieldTag::Real) {
        x = Signal(RealVector(sx * x.real_values()));
        y = Signal(RealVector(sy * y.real_values()));
      } else {
        x = Signal(ComplexVector(sx * x.complex_values()));
        y = Signal(ComplexVector(sy * y.complex_values()));
      }
      CHECK(objective(x, e, params) <= surrogate(x, y, e, params, tau) + 1e-12);
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(HuberParams{0.0}.validate(), InvalidArgument);
  CHECK_THROWS_AS((ObjectiveParams{{1.0}, -1.0}.validate()), InvalidArgument);
}

}  // TEST_SUITE

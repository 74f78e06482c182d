#include "robustpr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robustpr/errors.hpp"
#include "robustpr/random.hpp"

namespace robustpr {

namespace {

template <class Scalar>
Vec<Scalar> random_start(Index p, std::uint64_t seed) {
  Rng rng(derive_stream(seed, StreamTag::SpectralStart));
  Vec<Scalar> v(p);
  for (Index j = 0; j < p; ++j) {
    if constexpr (std::is_same_v<Scalar, double>)
      v[j] = rng.normal();
    else
      v[j] = rng.complex_normal();
  }
  return v / v.norm();
}

// Y v = (1/n) sum_i b_i a_i (a_i^H v), without forming Y.
template <class Scalar>
Vec<Scalar> apply_y(const Mat<Scalar>& sampling, const RealVector& b, const Vec<Scalar>& v) {
  const Vec<Scalar> weighted = (b.cast<Scalar>().array() * (sampling.conjugate() * v).array()).matrix();
  return sampling.transpose() * weighted / static_cast<double>(b.size());
}

template <class Scalar>
Vec<Scalar> truncate(const Vec<Scalar>& v, Index keep) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index l, Index r) { return std::abs(v[l]) > std::abs(v[r]); });
  Vec<Scalar> out = Vec<Scalar>::Zero(v.size());
  for (Index k = 0; k < keep; ++k) out[order[static_cast<std::size_t>(k)]] = v[order[static_cast<std::size_t>(k)]];
  return out;
}

template <class Scalar>
SpectralInit spectral_impl(const Mat<Scalar>& sampling, const RealVector& b, const SpectralConfig& cfg,
                           std::uint64_t seed) {
  const Index p = sampling.cols();
  if ((b.array() == 0.0).all()) return {Signal(Vec<Scalar>(Vec<Scalar>::Zero(p))), true, 0, {}};

  SpectralInit out{Signal(Vec<Scalar>(Vec<Scalar>::Zero(p))), false, 0, {}};
  Vec<Scalar> v = random_start<Scalar>(p, seed);
  for (int it = 0; it < cfg.power_iterations; ++it) {
    Vec<Scalar> next = apply_y(sampling, b, v);
    const double len = next.norm();
    if (len == 0.0) break;
    next /= len;
    const double overlap = std::abs(v.dot(next));
    v = std::move(next);
    out.rayleigh.push_back(std::real(v.dot(apply_y(sampling, b, v))));
    out.iterations = it + 1;
    if (1.0 - overlap < cfg.power_tol) break;
  }
  if (cfg.truncation) {
    v = truncate(v, *cfg.truncation);
    const double len = v.norm();
    if (len > 0.0) v /= len;
  }
  const double scale = std::sqrt(std::max(0.0, b.mean()));
  out.estimate = Signal(Vec<Scalar>(scale * v));
  return out;
}

}  // namespace

void SpectralConfig::validate(Index p) const {
  if (power_iterations < 1) throw InvalidArgument("power_iterations must be >= 1");
  if (!(power_tol > 0.0)) throw InvalidArgument("power_tol must be > 0");
  if (truncation && (*truncation < 1 || *truncation > p))
    throw InvalidArgument("spectral truncation must lie in [1, p]");
}

SpectralInit spectral_init(const MeasurementEnsemble& e, const SpectralConfig& cfg, std::uint64_t seed) {
  cfg.validate(e.p());
  if (e.field() == FieldTag::Real) return spectral_impl(e.sampling<double>(), e.observations(), cfg, seed);
  return spectral_impl(e.sampling<Complex>(), e.observations(), cfg, seed);
}

SpectralConfig default_spectral_config(FieldTag field, Index p, std::optional<Index> sparsity) {
  SpectralConfig cfg;
  if (field == FieldTag::Complex && sparsity) cfg.truncation = std::min(2 * *sparsity, p);
  return cfg;
}

}  // namespace robustpr

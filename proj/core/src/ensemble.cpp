#include "robustpr/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "robustpr/errors.hpp"
#include "robustpr/random.hpp"

namespace robustpr {

namespace {

template <class Scalar>
double abs2(Scalar v) {
  if constexpr (std::is_same_v<Scalar, double>)
    return v * v;
  else
    return std::norm(v);
}

}  // namespace

MeasurementEnsemble::MeasurementEnsemble(RealMatrix sampling, RealVector observations,
                                         std::optional<Signal> ground_truth, std::optional<RealVector> noise_record,
                                         std::uint64_t seed)
    : sampling_(std::move(sampling)),
      observations_(std::move(observations)),
      ground_truth_(std::move(ground_truth)),
      noise_record_(std::move(noise_record)),
      seed_(seed) {
  validate();
}

MeasurementEnsemble::MeasurementEnsemble(ComplexMatrix sampling, RealVector observations,
                                         std::optional<Signal> ground_truth, std::optional<RealVector> noise_record,
                                         std::uint64_t seed)
    : sampling_(std::move(sampling)),
      observations_(std::move(observations)),
      ground_truth_(std::move(ground_truth)),
      noise_record_(std::move(noise_record)),
      seed_(seed) {
  validate();
}

Index MeasurementEnsemble::p() const noexcept {
  return std::visit([](const auto& a) { return a.cols(); }, sampling_);
}

template <class Scalar>
const Mat<Scalar>& MeasurementEnsemble::sampling() const {
  if (const auto* a = std::get_if<Mat<Scalar>>(&sampling_)) return *a;
  throw InvalidArgument("ensemble is " + std::string(to_string(field())) + ", requested " +
                        std::string(to_string(field_of<Scalar>())));
}

template const Mat<double>& MeasurementEnsemble::sampling<double>() const;
template const Mat<Complex>& MeasurementEnsemble::sampling<Complex>() const;

void MeasurementEnsemble::validate() const {
  const Index rows = std::visit([](const auto& a) { return a.rows(); }, sampling_);
  const bool finite = std::visit([](const auto& a) { return a.allFinite(); }, sampling_);
  if (n() < 1) throw InvalidArgument("ensemble needs n >= 1 measurements");
  if (p() < 1) throw InvalidArgument("ensemble needs p >= 1");
  if (rows != n()) throw InvalidArgument("sampling rows (" + std::to_string(rows) + ") != observations (" +
                                         std::to_string(n()) + ")");
  if (!finite) throw InvalidArgument("sampling vectors must be finite");
  if (!observations_.allFinite()) throw InvalidArgument("observations must be finite");
  if (ground_truth_) check_compatible(*ground_truth_);
  if (noise_record_) {
    if (noise_record_->size() != n()) throw InvalidArgument("noise record length != n");
    if (!noise_record_->allFinite()) throw InvalidArgument("noise record must be finite");
  }
  if (ground_truth_ && noise_record_) {
    const RealVector clean = clean_measurements(*this, *ground_truth_);
    const double scale = 1.0 + observations_.cwiseAbs().maxCoeff();
    const double worst = (observations_ - clean - *noise_record_).cwiseAbs().maxCoeff();
    if (worst > 1e-12 * scale)
      throw InvalidArgument("observations inconsistent with ground truth and noise record");
  }
}

void MeasurementEnsemble::check_compatible(const Signal& x) const {
  if (x.field() != field())
    throw InvalidArgument("field mismatch: signal is " + std::string(to_string(x.field())) + ", ensemble is " +
                          std::string(to_string(field())));
  if (x.size() != p())
    throw InvalidArgument("dimension mismatch: signal has " + std::to_string(x.size()) + " entries, ensemble p = " +
                          std::to_string(p()));
}

MeasurementEnsemble MeasurementEnsemble::subset(const std::vector<Index>& rows) const {
  RealVector b(static_cast<Index>(rows.size()));
  std::optional<RealVector> eps;
  if (noise_record_) eps = RealVector(b.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    b[static_cast<Index>(k)] = observations_[rows[k]];
    if (eps) (*eps)[static_cast<Index>(k)] = (*noise_record_)[rows[k]];
  }
  return std::visit(
      [&](const auto& a) {
        std::decay_t<decltype(a)> sub(static_cast<Index>(rows.size()), a.cols());
        for (std::size_t k = 0; k < rows.size(); ++k) sub.row(static_cast<Index>(k)) = a.row(rows[k]);
        return MeasurementEnsemble(std::move(sub), std::move(b), ground_truth_, std::move(eps), seed_);
      },
      sampling_);
}

MeasurementEnsemble MeasurementEnsemble::with_observations(RealVector b) const {
  return std::visit([&](const auto& a) { return MeasurementEnsemble(a, std::move(b), ground_truth_, std::nullopt, seed_); },
                    sampling_);
}

bool operator==(const MeasurementEnsemble& a, const MeasurementEnsemble& b) {
  if (a.field() != b.field() || a.n() != b.n() || a.p() != b.p() || a.seed_ != b.seed_) return false;
  const bool same_sampling = a.field() == FieldTag::Real ? a.sampling<double>() == b.sampling<double>()
                                                        : a.sampling<Complex>() == b.sampling<Complex>();
  return same_sampling && a.observations_ == b.observations_ && a.ground_truth_ == b.ground_truth_ &&
         a.noise_record_ == b.noise_record_;
}

template <class Scalar>
RealVector clean_measurements(const Mat<Scalar>& sampling, const Vec<Scalar>& x) {
  const Vec<Scalar> z = sampling.conjugate() * x;
  RealVector out(z.size());
  for (Index i = 0; i < z.size(); ++i) out[i] = abs2(z[i]);
  return out;
}

template RealVector clean_measurements<double>(const Mat<double>&, const Vec<double>&);
template RealVector clean_measurements<Complex>(const Mat<Complex>&, const Vec<Complex>&);

RealVector clean_measurements(const MeasurementEnsemble& e, const Signal& x) {
  return visit(e, x, [](const auto& a, const auto& v) { return clean_measurements(a, v); });
}

void NoiseSpec::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("noise intensity eta must be finite and >= 0");
  if (kind == NoiseKind::TypeIII && eta > 1.0) throw InvalidArgument("type3 corruption probability must be <= 1");
}

NoiseSpec parse_noise(std::string_view text) {
  if (text == "none") return NoiseSpec::none();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw InvalidArgument("noise must be 'none' or '<kind>:<eta>', got '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon);
  const std::string eta_text(text.substr(colon + 1));
  NoiseSpec spec;
  if (kind == "type1")
    spec.kind = NoiseKind::TypeI;
  else if (kind == "type2")
    spec.kind = NoiseKind::TypeII;
  else if (kind == "type3")
    spec.kind = NoiseKind::TypeIII;
  else if (kind == "gaussian")
    spec.kind = NoiseKind::Gaussian;
  else if (kind == "none")
    spec.kind = NoiseKind::None;
  else
    throw InvalidArgument("unknown noise kind '" + std::string(kind) + "'");
  std::size_t used = 0;
  try {
    spec.eta = std::stod(eta_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != eta_text.size()) throw InvalidArgument("bad noise intensity '" + eta_text + "'");
  spec.validate();
  return spec;
}

std::string to_string(const NoiseSpec& spec) {
  const char* name = "none";
  switch (spec.kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::TypeI: name = "type1"; break;
    case NoiseKind::TypeII: name = "type2"; break;
    case NoiseKind::TypeIII: name = "type3"; break;
    case NoiseKind::Gaussian: name = "gaussian"; break;
  }
  std::ostringstream out;
  out << name << ':' << spec.eta;
  return out.str();
}

Signal generate_signal(Index p, Index s, FieldTag field, std::uint64_t seed) {
  if (p < 1) throw InvalidArgument("p must be >= 1");
  if (s < 1 || s > p) throw InvalidArgument("sparsity s must satisfy 1 <= s <= p");
  Rng rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates: the first s slots are a uniform s-subset.
  for (Index k = 0; k < s; ++k) {
    const auto r = k + static_cast<Index>(rng.index(static_cast<std::uint64_t>(p - k)));
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(r)]);
  }
  std::sort(idx.begin(), idx.begin() + s);
  if (field == FieldTag::Real) {
    RealVector x = RealVector::Zero(p);
    for (Index k = 0; k < s; ++k) x[idx[static_cast<std::size_t>(k)]] = rng.normal();
    return Signal(std::move(x));
  }
  ComplexVector x = ComplexVector::Zero(p);
  for (Index k = 0; k < s; ++k) x[idx[static_cast<std::size_t>(k)]] = rng.complex_normal();
  return Signal(std::move(x));
}

RealMatrix generate_real_sampling(Index p, Index n, std::uint64_t seed) {
  if (p < 1 || n < 1) throw InvalidArgument("sampling needs n, p >= 1");
  Rng rng(seed);
  RealMatrix a(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a;
}

ComplexMatrix generate_complex_sampling(Index p, Index n, std::uint64_t seed) {
  if (p < 1 || n < 1) throw InvalidArgument("sampling needs n, p >= 1");
  Rng rng(seed);
  ComplexMatrix a(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = rng.complex_normal();
  return a;
}

NoisyObservations apply_noise(const RealVector& clean_b, const Signal& x_true, const NoiseSpec& spec,
                              std::uint64_t seed) {
  spec.validate();
  const Index n = clean_b.size();
  RealVector eps = RealVector::Zero(n);
  RealVector b = clean_b;
  Rng rng(seed);
  const double signal_energy = x_true.norm() * x_true.norm();
  switch (spec.kind) {
    case NoiseKind::None:
      break;
    case NoiseKind::TypeI: {
      const double mu = spec.eta * signal_energy;
      for (Index i = 0; i < n; ++i) eps[i] = mu * rng.uniform01();
      break;
    }
    case NoiseKind::TypeII: {
      const double mu = spec.eta * std::sqrt(clean_b.squaredNorm() / static_cast<double>(n));
      const double scale = mu / std::sqrt(2.0);
      for (Index i = 0; i < n; ++i) eps[i] = rng.laplace(scale);
      break;
    }
    case NoiseKind::TypeIII: {
      // Two draws per measurement regardless of the coin so streams stay aligned.
      for (Index i = 0; i < n; ++i) {
        const bool corrupt = rng.uniform01() < spec.eta;
        const double replacement = signal_energy * rng.uniform01();
        if (corrupt) {
          b[i] = replacement;
          eps[i] = replacement - clean_b[i];
        }
      }
      return {std::move(b), std::move(eps)};
    }
    case NoiseKind::Gaussian: {
      const double sigma = spec.eta * clean_b.norm() / std::sqrt(static_cast<double>(n));
      for (Index i = 0; i < n; ++i) eps[i] = sigma * rng.normal();
      break;
    }
  }
  b += eps;
  return {std::move(b), std::move(eps)};
}

MeasurementEnsemble measure_signal(const Signal& x, Index n, const NoiseSpec& spec, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  spec.validate();
  const auto build = [&](auto sampling) {
    RealVector clean = clean_measurements(sampling, x.values<typename decltype(sampling)::Scalar>());
    auto noisy = apply_noise(clean, x, spec, derive_stream(seed, StreamTag::Noise));
    return MeasurementEnsemble(std::move(sampling), std::move(noisy.b), x, std::move(noisy.eps), seed);
  };
  if (x.is_real()) return build(generate_real_sampling(x.size(), n, derive_stream(seed, StreamTag::Sampling)));
  return build(generate_complex_sampling(x.size(), n, derive_stream(seed, StreamTag::Sampling)));
}

MeasurementEnsemble synthesize_instance(Index p, Index s, Index n, FieldTag field, const NoiseSpec& spec,
                                        std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  spec.validate();
  return measure_signal(generate_signal(p, s, field, derive_stream(seed, StreamTag::Signal)), n, spec, seed);
}

}  // namespace robustpr
